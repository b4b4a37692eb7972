#pragma once

/// @file solver.hpp
/// @brief The modulus fixed-point iteration over a built splitting.
///
/// One step solves
///   (M_phi1 + phi_phi1 + phi2) z+ = (N_phi1 + phi_phi1) z
///       + |(A_phi1 - phi2) z + phi1 q + phi2 psi(z)| + phi2 psi(z) - phi1 q
/// with the system matrix factored once and reused across iterations. The
/// stopping residual Res(z) = ||min(z - psi(z), A z + q)||_2 is evaluated
/// before each step through the same residual() code path the rest of the
/// library uses.

#include "icpkit/analysis.hpp"
#include "icpkit/errors.hpp"
#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"
#include "icpkit/problem.hpp"
#include "icpkit/splitting.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

enum class StopReason { tolerance_met, max_iter, linear_solve_failure };

inline std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tolerance_met: return "tolerance_met";
    case StopReason::max_iter: return "max_iter";
    case StopReason::linear_solve_failure: return "linear_solve_failure";
  }
  return "unknown";
}

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 5000;
  Vec z0;  // empty selects the zero start; must be entrywise nonnegative
  bool record_history = true;
};

/// Residual growth beyond this factor of the initial residual aborts the run
/// with the divergence flag set.
inline constexpr double kDivergenceFactor = 1e12;

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  Vec z_final;
  /// Res before each step plus the final point: length iterations + 1 when
  /// recorded, empty otherwise.
  Vec residual_history;
  StopReason stop_reason = StopReason::max_iter;
  /// Set when the run was aborted because Res exceeded kDivergenceFactor
  /// times the initial residual (stop_reason stays max_iter).
  bool diverged = false;
};

namespace detail {

inline Vec resolve_start(const SolverConfig& cfg, int n) {
  if (cfg.z0.empty()) return zeros(n);
  if (static_cast<int>(cfg.z0.size()) != n)
    throw std::invalid_argument("z0 dimension mismatch");
  for (double v : cfg.z0)
    if (!(v >= 0.0)) throw std::invalid_argument("z0 must be entrywise nonnegative");
  return cfg.z0;
}

inline void validate_config(const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cfg.max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
}

}  // namespace detail

/// Iteration engine: owns the built splitting and the factored system matrix.
/// Construction throws singular_system_error when the system matrix cannot be
/// factored.
class ModulusEngine {
 public:
  explicit ModulusEngine(BuiltSplitting built)
      : b_(std::move(built)), solver_(b_.system_matrix) {}

  const BuiltSplitting& built() const { return b_; }
  int n() const { return b_.system_matrix.n(); }

  /// One iteration from z.
  Vec step(const IcpProblem& prob, std::span<const double> z) const {
    if (prob.n() != n() || static_cast<int>(z.size()) != n())
      throw std::invalid_argument("step: dimension mismatch");
    const Vec y = prob.psi().eval(z);
    const Vec az = b_.A_phi1.matvec(z);
    const Vec nz = b_.N_phi1.matvec(z);
    const Vec& q = prob.q();
    Vec rhs(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      const double wq = b_.phi1[i] * q[u];
      const double xy = b_.phi2[i] * y[u];
      const double inner = az[u] - b_.phi2[i] * z[u] + wq + xy;
      rhs[u] = nz[u] + b_.phi_phi1[i] * z[u] + std::abs(inner) - wq + xy;
    }
    return solver_.solve(std::move(rhs));
  }

  SolveReport run(const IcpProblem& prob, const SolverConfig& cfg) const {
    detail::validate_config(cfg);
    if (prob.n() != n()) throw std::invalid_argument("run: dimension mismatch");
    SolveReport rep;
    Vec z = detail::resolve_start(cfg, n());
    double res = residual(prob, z);
    const double res0 = res;
    if (cfg.record_history) rep.residual_history.push_back(res);
    int k = 0;
    while (true) {
      if (res < cfg.tol) {
        rep.converged = true;
        rep.stop_reason = StopReason::tolerance_met;
        break;
      }
      if (k >= cfg.max_iter) {
        rep.stop_reason = StopReason::max_iter;
        break;
      }
      if (std::isnan(res) || (res0 > 0.0 && res > kDivergenceFactor * res0)) {
        rep.diverged = true;
        rep.stop_reason = StopReason::max_iter;
        break;
      }
      z = step(prob, z);
      ++k;
      res = residual(prob, z);
      if (cfg.record_history) rep.residual_history.push_back(res);
    }
    rep.iterations = k;
    rep.z_final = std::move(z);
    return rep;
  }

 private:
  BuiltSplitting b_;
  SystemSolver solver_;
};

/// Run the iteration to convergence or exhaustion. A singular system matrix
/// is reported as stop_reason = linear_solve_failure with the starting point
/// and its residual as the partial history.
inline SolveReport solve(const BuiltSplitting& built, const IcpProblem& prob,
                         const SolverConfig& cfg) {
  detail::validate_config(cfg);
  try {
    return ModulusEngine(built).run(prob, cfg);
  } catch (const singular_system_error&) {
    SolveReport rep;
    rep.converged = false;
    rep.iterations = 0;
    rep.z_final = detail::resolve_start(cfg, prob.n());
    if (cfg.record_history) rep.residual_history.push_back(residual(prob, rep.z_final));
    rep.stop_reason = StopReason::linear_solve_failure;
    return rep;
  }
}

/// Single diagnostic step; factors the system matrix on every call. Throws
/// singular_system_error when the system matrix cannot be factored.
inline Vec iterate_once(const BuiltSplitting& built, const IcpProblem& prob,
                        std::span<const double> z) {
  return ModulusEngine(built).step(prob, z);
}

/// One entry per executed step: the error |z_k+1 - z*| and the certified
/// componentwise bound L |z_k - z*| it must stay under.
struct ErrorBoundPair {
  Vec error;
  Vec bound;
};

/// Replay the solve loop from cfg.z0 against a known solution z_star,
/// emitting the per-step componentwise error next to its bound through the
/// iteration matrix L. z_star must certify as a solution within 1e-6.
inline std::vector<ErrorBoundPair> error_contraction_trace(const BuiltSplitting& built,
                                                           const IcpProblem& prob,
                                                           const SolverConfig& cfg,
                                                           std::span<const double> z_star) {
  detail::validate_config(cfg);
  if (static_cast<int>(z_star.size()) != prob.n())
    throw std::invalid_argument("z_star dimension mismatch");
  if (!certify_solution(prob, z_star, 1e-6).is_solution)
    throw std::invalid_argument("z_star does not certify as a solution within 1e-6");
  const Matrix l = iteration_matrix_L(built, prob.psi().lipschitz_G());
  ModulusEngine engine(built);

  std::vector<ErrorBoundPair> out;
  Vec z = detail::resolve_start(cfg, prob.n());
  double res = residual(prob, z);
  const double res0 = res;
  int k = 0;
  while (res >= cfg.tol && k < cfg.max_iter &&
         !(std::isnan(res) || (res0 > 0.0 && res > kDivergenceFactor * res0))) {
    Vec e_prev(static_cast<std::size_t>(prob.n()));
    for (int i = 0; i < prob.n(); ++i)
      e_prev[static_cast<std::size_t>(i)] =
          std::abs(z[static_cast<std::size_t>(i)] - z_star[static_cast<std::size_t>(i)]);
    z = engine.step(prob, z);
    ++k;
    ErrorBoundPair pair;
    pair.bound = l.matvec(e_prev);
    pair.error.resize(static_cast<std::size_t>(prob.n()));
    for (int i = 0; i < prob.n(); ++i)
      pair.error[static_cast<std::size_t>(i)] =
          std::abs(z[static_cast<std::size_t>(i)] - z_star[static_cast<std::size_t>(i)]);
    out.push_back(std::move(pair));
    res = residual(prob, z);
  }
  return out;
}

}  // namespace icpkit
