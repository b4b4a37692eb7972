#pragma once

/// @file icpkit.hpp
/// @brief Umbrella header for the whole toolkit.

#include "icpkit/analysis.hpp"
#include "icpkit/errors.hpp"
#include "icpkit/experiment.hpp"
#include "icpkit/generators.hpp"
#include "icpkit/io.hpp"
#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"
#include "icpkit/oracle.hpp"
#include "icpkit/problem.hpp"
#include "icpkit/solver.hpp"
#include "icpkit/splitting.hpp"
