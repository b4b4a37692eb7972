#pragma once

/// @file errors.hpp
/// @brief Exception types shared across the library.

#include <stdexcept>
#include <string>

namespace icpkit {

/// A linear system is singular to working precision.
struct singular_system_error : std::runtime_error {
  explicit singular_system_error(const std::string& what) : std::runtime_error(what) {}
};

/// An exhaustive routine was asked to run above its hard dimension cap.
struct dimension_limit_error : std::invalid_argument {
  explicit dimension_limit_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace icpkit
