#pragma once

/// @file oracle.hpp
/// @brief Exhaustive active-set reference solver for small problems.
///
/// For each of the 2^n subsets S of indices, solve the linear system that
/// pins r_i = z_i - psi_i(z) = 0 for i in S and p_i = (A z + q)_i = 0 for
/// i not in S, then keep the solutions that are feasible. Complementarity
/// holds by construction. Solutions come back ordered by subset bitmask, so
/// the output is deterministic.

#include "icpkit/errors.hpp"
#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"
#include "icpkit/problem.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace icpkit {

inline constexpr int kOracleDimensionCap = 15;
inline constexpr double kOracleFeasibilitySlack = 1e-10;
inline constexpr double kOracleDedupTolerance = 1e-8;

/// All solutions of the problem found by active-set enumeration, deduplicated
/// to kOracleDedupTolerance in the infinity norm. Subset systems that are
/// singular to working precision are skipped. Throws dimension_limit_error
/// above the cap.
inline std::vector<Vec> oracle_solve(const IcpProblem& prob,
                                     int dimension_cap = kOracleDimensionCap) {
  const int n = prob.n();
  if (n > dimension_cap)
    throw dimension_limit_error("oracle_solve: dimension " + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(dimension_cap));
  const Matrix& a = prob.A();
  const PsiMap& psi = prob.psi();
  const bool affine = psi.kind() == PsiMap::Kind::affine;

  std::vector<Vec> solutions;
  Vec sys(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  Vec rhs(static_cast<std::size_t>(n));
  const std::uint32_t total = 1u << n;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    // Row i: in S, (I - C) z = d (r_i = 0); outside S, A z = -q (p_i = 0).
    for (int i = 0; i < n; ++i) {
      double* row = sys.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
      const std::size_t u = static_cast<std::size_t>(i);
      if (mask & (1u << i)) {
        for (int j = 0; j < n; ++j) row[j] = (i == j) ? 1.0 : 0.0;
        if (affine)
          for (int j = 0; j < n; ++j) row[j] -= psi.C().at(i, j);
        rhs[u] = psi.kind() == PsiMap::Kind::zero ? 0.0 : psi.d()[u];
      } else {
        for (int j = 0; j < n; ++j) row[j] = a.at(i, j);
        rhs[u] = -prob.q()[u];
      }
    }
    Vec z;
    try {
      z = DenseLu(Matrix::dense(n, sys)).solve(rhs);
    } catch (const singular_system_error&) {
      continue;
    }
    const Vec p = prob.p_value(z);
    const Vec r = prob.r_value(z);
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      feasible = (p[u] >= -kOracleFeasibilitySlack) && (r[u] >= -kOracleFeasibilitySlack);
    }
    if (!feasible) continue;
    bool duplicate = false;
    for (const Vec& s : solutions) {
      double dist = 0.0;
      for (int i = 0; i < n; ++i)
        dist = std::max(dist, std::abs(s[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)]));
      if (dist <= kOracleDedupTolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) solutions.push_back(std::move(z));
  }
  return solutions;
}

}  // namespace icpkit
