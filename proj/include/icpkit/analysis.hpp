#pragma once

/// @file analysis.hpp
/// @brief Convergence certificates for the modulus iteration.
///
/// Each checker evaluates the hypotheses of one sufficient convergence
/// condition and returns a Certificate with the computed quantities and, on
/// failure, human-readable reasons. Certificates are advisory: the solver
/// runs whether or not any certificate holds, and a failed certificate does
/// not imply divergence.
///
/// Comparisons are strict with no epsilon slack. Spectral-radius comparisons
/// within 1e-8 of their threshold are reported as borderline and the
/// certificate does not hold.

#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"
#include "icpkit/problem.hpp"
#include "icpkit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

enum class CertificateKind {
  p_spectral,         // P-matrix A and rho(L) < 1
  h_splitting,        // H_+ matrix A, H-compatible splitting, entrywise G bounds
  aor_gate,           // AOR-family parameter gate on the scaled radius
  sdd_scaling_case1,  // diagonal-scaling test, phi2 >= D_phi1 branch
  sdd_scaling_case2,  // diagonal-scaling test, 0 < phi2 < D_phi1 branch
};

inline std::string kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::p_spectral: return "p_spectral";
    case CertificateKind::h_splitting: return "h_splitting";
    case CertificateKind::aor_gate: return "aor_gate";
    case CertificateKind::sdd_scaling_case1: return "sdd_scaling_case1";
    case CertificateKind::sdd_scaling_case2: return "sdd_scaling_case2";
  }
  return "unknown";
}

struct Certificate {
  CertificateKind kind = CertificateKind::p_spectral;
  bool holds = false;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<std::pair<std::string, Vec>> vector_quantities;
  std::vector<std::string> reasons;

  void add_quantity(std::string name, double value) {
    quantities.emplace_back(std::move(name), value);
  }
  void add_vector(std::string name, Vec value) {
    vector_quantities.emplace_back(std::move(name), std::move(value));
  }
  void fail(std::string reason) {
    holds = false;
    reasons.push_back(std::move(reason));
  }

  /// Quantity lookup; NaN when absent.
  double quantity(const std::string& name) const {
    for (const auto& [k, v] : quantities)
      if (k == name) return v;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

/// Full-precision "key: value" report, one line per quantity and reason.
inline std::string certificate_report(const Certificate& c) {
  std::string out = "certificate: " + kind_name(c.kind) + "\n";
  out += std::string("holds: ") + (c.holds ? "true" : "false") + "\n";
  char buf[64];
  for (const auto& [k, v] : c.quantities) {
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    out += k + ": " + buf + "\n";
  }
  for (const auto& [k, vec] : c.vector_quantities) {
    out += k + ":";
    for (double v : vec) {
      std::snprintf(buf, sizeof(buf), " %.16e", v);
      out += buf;
    }
    out += "\n";
  }
  for (const std::string& r : c.reasons) out += "reason: " + r + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Strict threshold comparison with a borderline window
// ---------------------------------------------------------------------------

enum class GateOutcome { pass, fail, borderline };

/// value < threshold, strict; within window of the threshold is borderline.
inline GateOutcome classify_strict_less(double value, double threshold,
                                        double window = 1e-8) {
  if (std::abs(value - threshold) <= window) return GateOutcome::borderline;
  return value < threshold ? GateOutcome::pass : GateOutcome::fail;
}

// ---------------------------------------------------------------------------
// Iteration matrix
// ---------------------------------------------------------------------------

/// L = |(M_phi1 + phi_phi1 + phi2)^-1| (|N_phi1 + phi_phi1| + |A_phi1 - phi2| + 2 phi2 G),
/// the nonnegative matrix whose spectral radius below one certifies
/// convergence and whose entries bound the per-step error propagation
/// componentwise. Dense result. Throws singular_system_error when the system
/// matrix cannot be inverted.
inline Matrix iteration_matrix_L(const BuiltSplitting& b, const Matrix& g) {
  const int n = b.system_matrix.n();
  if (g.n() != n) throw std::invalid_argument("iteration_matrix_L: G dimension mismatch");
  SystemSolver solver(b.system_matrix);

  Matrix abs_inv = Matrix::dense(n);
  for (int j = 0; j < n; ++j) {
    const Vec col = solver.solve(unit_vector(n, j));
    for (int i = 0; i < n; ++i)
      abs_inv.dense_at(i, j) = std::abs(col[static_cast<std::size_t>(i)]);
  }

  Vec neg_phi2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) neg_phi2[static_cast<std::size_t>(i)] = -b.phi2[i];
  const Matrix t1 = entrywise_abs(add_diagonal(b.N_phi1, b.phi_phi1));
  const Matrix t2 = entrywise_abs(add_diagonal(b.A_phi1, neg_phi2));
  const Matrix t3 = scale_entries(scale_rows(b.phi2, g), 2.0);
  const Matrix f = add(add(t1.to_dense(), t2), t3);
  return dense_multiply(abs_inv, f);
}

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

/// Certificate: A is a P-matrix and rho(L) < 1. The P-matrix test enumerates
/// principal minors and is skipped (certificate does not hold, with a reason)
/// above the enumeration cap; rho(L) is then not computed either.
inline Certificate check_p_spectral(const BuiltSplitting& b, const IcpProblem& prob) {
  Certificate c;
  c.kind = CertificateKind::p_spectral;
  c.holds = true;

  bool p_ok = false;
  try {
    p_ok = is_p_matrix(prob.A());
  } catch (const dimension_limit_error&) {
    c.add_quantity("p_check_capped", 1.0);
    c.fail("P-matrix check skipped: dimension " + std::to_string(prob.n()) +
           " exceeds the principal-minor enumeration cap " +
           std::to_string(kPMatrixDimensionCap) + "; certificate is inconclusive");
    return c;
  }
  c.add_quantity("p_matrix", p_ok ? 1.0 : 0.0);
  if (!p_ok) c.fail("A is not a P-matrix");

  Matrix l;
  try {
    l = iteration_matrix_L(b, prob.psi().lipschitz_G());
  } catch (const singular_system_error&) {
    c.fail("system matrix is singular; iteration matrix undefined");
    return c;
  }
  const SpectralRadiusResult rho = spectral_radius_nonneg(l);
  c.add_quantity("rho_L", rho.value);
  if (!rho.converged) {
    c.fail("spectral radius estimate did not converge; certificate is inconclusive");
    return c;
  }
  switch (classify_strict_less(rho.value, 1.0)) {
    case GateOutcome::pass: break;
    case GateOutcome::borderline:
      c.fail("rho(L) is within 1e-8 of 1 (borderline)");
      break;
    case GateOutcome::fail:
      c.fail("rho(L) >= 1");
      break;
  }
  return c;
}

/// Certificate: A is an H-matrix with positive diagonal, the splitting is
/// H-compatible (<M1 + phi> - |N1 + phi| is a nonsingular M-matrix),
/// phi2 >= D_phi1, and the Lipschitz bound G satisfies the entrywise bounds
///   g_ii <= (w_i |n_ii + phi_i| - (w_i n_ii + |w_i phi_i|)) / (2 xi_i)
///   g_ij <= (|w_i m_ij| + |w_i n_ij| - |w_i a_ij|) / (2 xi_i),  i != j
/// with w = phi1 and xi = phi2. The diagonal bound can be negative, in which
/// case no nonnegative g_ii passes; the bound is evaluated verbatim.
inline Certificate check_h_splitting(const BuiltSplitting& b, const IcpProblem& prob) {
  Certificate c;
  c.kind = CertificateKind::h_splitting;
  c.holds = true;
  const int n = prob.n();
  const Matrix& a = prob.A();
  const Matrix& g = prob.psi().lipschitz_G();

  if (!is_h_plus_matrix(a)) c.fail("A is not an H-matrix with positive diagonal");

  const Matrix abar = subtract(comparison_matrix(add_diagonal(b.M1, b.phi)),
                               entrywise_abs(add_diagonal(b.N1, b.phi)));
  const MMatrixCheck mc = check_m_matrix(abar);
  if (!mc.is_m)
    c.fail("splitting is not H-compatible: <M1 + phi> - |N1 + phi| is not a nonsingular "
           "M-matrix (" + mc.reason_text() + ")");

  const Vec adiag = diagonal_of(a);
  double dom_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    dom_margin = std::min(dom_margin, b.phi2[i] - b.phi1[i] * adiag[static_cast<std::size_t>(i)]);
  c.add_quantity("phi2_minus_Dphi1_min", dom_margin);
  if (!(dom_margin >= 0.0)) c.fail("phi2 >= D_phi1 violated");

  // Off-diagonal bounds are nonnegative (|m| + |n| >= |a| whenever m - n = a),
  // so absent G entries pass them automatically; only stored G entries and
  // every diagonal position need evaluation.
  double bound_margin = std::numeric_limits<double>::infinity();
  int violations = 0;
  auto check_position = [&](int i, int j, double gij) {
    const double w = b.phi1[i];
    const double xi = b.phi2[i];
    double bound;
    if (i == j) {
      const double nii = b.N1.at(i, i);
      const double ph = b.phi[i];
      bound = (w * std::abs(nii + ph) - (w * nii + std::abs(w * ph))) / (2.0 * xi);
    } else {
      bound = (std::abs(w * b.M1.at(i, j)) + std::abs(w * b.N1.at(i, j)) -
               std::abs(w * a.at(i, j))) / (2.0 * xi);
    }
    bound_margin = std::min(bound_margin, bound - gij);
    if (!(gij <= bound)) ++violations;
  };
  for (int i = 0; i < n; ++i) check_position(i, i, g.at(i, i));
  g.for_each_entry([&](int i, int j, double v) {
    if (i != j) check_position(i, j, v);
  });
  c.add_quantity("g_bound_margin_min", bound_margin);
  if (violations > 0)
    c.fail("Lipschitz bound G violates the entrywise bounds at " +
           std::to_string(violations) + " position(s)");
  return c;
}

/// Certificate for the AOR-family parameter gate: A is an H-matrix with
/// positive diagonal, phi2 >= D_phi1, and with
///   rho* = rho(D_phi1^-1 (|B_phi1| + phi2 G)),   B = D - A,
/// both rho* < 1 and 0 <= max(theta1, theta2) rho* < min(1, theta1) hold.
inline Certificate check_aor_gate(const Matrix& a, const DiagonalMatrix& phi1,
                                  const DiagonalMatrix& phi2, const Matrix& g,
                                  double theta1, double theta2) {
  Certificate c;
  c.kind = CertificateKind::aor_gate;
  c.holds = true;
  const int n = a.n();
  if (phi1.size() != n || phi2.size() != n || g.n() != n)
    throw std::invalid_argument("check_aor_gate: dimension mismatch");
  phi1.require_strictly_positive("phi1");
  phi2.require_strictly_positive("phi2");

  if (!is_h_plus_matrix(a)) c.fail("A is not an H-matrix with positive diagonal");

  const Vec adiag = diagonal_of(a);
  double dom_margin = std::numeric_limits<double>::infinity();
  bool diag_positive = true;
  for (int i = 0; i < n; ++i) {
    const double d = adiag[static_cast<std::size_t>(i)];
    if (!(d > 0.0)) diag_positive = false;
    dom_margin = std::min(dom_margin, phi2[i] - phi1[i] * d);
  }
  c.add_quantity("phi2_minus_Dphi1_min", dom_margin);
  if (!(dom_margin >= 0.0)) c.fail("phi2 >= D_phi1 violated");
  if (!diag_positive) {
    c.fail("diag(A) must be strictly positive to form the gate radius");
    return c;
  }

  // R = D_phi1^-1 (|B_phi1| + phi2 G): row i scaled by 1/(w_i a_ii).
  const Matrix b_abs = map_entries(a, [](int i, int j, double v) {
    return i == j ? 0.0 : std::abs(v);
  });
  Matrix r = add(scale_rows(phi1, b_abs), scale_rows(phi2, g));
  {
    Vec inv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      inv[static_cast<std::size_t>(i)] = 1.0 / (phi1[i] * adiag[static_cast<std::size_t>(i)]);
    r = scale_rows(DiagonalMatrix(std::move(inv)), r);
  }
  const SpectralRadiusResult rho = spectral_radius_nonneg(r);
  c.add_quantity("rho_star", rho.value);
  if (!rho.converged) {
    c.fail("spectral radius estimate did not converge; certificate is inconclusive");
    return c;
  }
  switch (classify_strict_less(rho.value, 1.0)) {
    case GateOutcome::pass: break;
    case GateOutcome::borderline:
      c.fail("rho* is within 1e-8 of 1 (borderline)");
      break;
    case GateOutcome::fail:
      c.fail("rho* >= 1");
      break;
  }

  const double gate_value = std::max(theta1, theta2) * rho.value;
  const double gate_threshold = std::min(1.0, theta1);
  c.add_quantity("gate_value", gate_value);
  c.add_quantity("gate_threshold", gate_threshold);
  if (!(gate_value >= 0.0)) {
    c.fail("max(theta1, theta2) rho* is negative");
  } else {
    switch (classify_strict_less(gate_value, gate_threshold)) {
      case GateOutcome::pass: break;
      case GateOutcome::borderline:
        c.fail("max(theta1, theta2) rho* is within 1e-8 of min(1, theta1) (borderline)");
        break;
      case GateOutcome::fail:
        c.fail("max(theta1, theta2) rho* >= min(1, theta1)");
        break;
    }
  }
  return c;
}

/// Certificate via diagonal scaling: Abar = <M1 + phi> - |N1 + phi| must be a
/// nonsingular M-matrix; U = diag(Abar^-1 e) then makes Abar U strictly
/// diagonally dominant, and with
///   W = <M_phi1 + phi> - |N_phi1 + phi| - phi2 G
/// the certified branches are
///   case 1: phi2 >= D_phi1       and  W U e > 0
///   case 2: 0 < phi2 < D_phi1    and  (phi2 - D_phi1) U e + W U e > 0
/// componentwise, all strict.
inline Certificate check_sdd_scaling(const BuiltSplitting& b, const IcpProblem& prob,
                                     int case_id) {
  if (case_id != 1 && case_id != 2)
    throw std::invalid_argument("check_sdd_scaling: case_id must be 1 or 2");
  Certificate c;
  c.kind = case_id == 1 ? CertificateKind::sdd_scaling_case1
                        : CertificateKind::sdd_scaling_case2;
  c.holds = true;
  const int n = prob.n();

  const Matrix abar = subtract(comparison_matrix(add_diagonal(b.M1, b.phi)),
                               entrywise_abs(add_diagonal(b.N1, b.phi)));
  const MMatrixCheck mc = check_m_matrix(abar);
  if (!mc.is_m) {
    c.fail("<M1 + phi> - |N1 + phi| is not a nonsingular M-matrix (" + mc.reason_text() +
           "); no scaling exists");
    return c;
  }
  const DiagonalMatrix u(mc.x);
  c.add_vector("U", mc.x);
  if (!is_sdd(scale_cols(abar, u)))
    c.fail("scaled matrix <M1 + phi> U - |N1 + phi| U is not strictly diagonally dominant");

  const Matrix w = subtract(subtract(comparison_matrix(add_diagonal(b.M_phi1, b.phi)),
                                     entrywise_abs(add_diagonal(b.N_phi1, b.phi))),
                            scale_rows(b.phi2, prob.psi().lipschitz_G()));
  const Vec wu = w.matvec(u.diag());

  const Vec adiag = diagonal_of(prob.A());
  double dom_margin = std::numeric_limits<double>::infinity();  // phi2 - D_phi1, min entry
  double dom_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double gap = b.phi2[i] - b.phi1[i] * adiag[static_cast<std::size_t>(i)];
    dom_margin = std::min(dom_margin, gap);
    dom_max = std::max(dom_max, gap);
  }
  c.add_quantity("phi2_minus_Dphi1_min", dom_margin);

  if (case_id == 1) {
    if (!(dom_margin >= 0.0)) c.fail("phi2 >= D_phi1 violated");
    double check_min = std::numeric_limits<double>::infinity();
    for (double v : wu) check_min = std::min(check_min, v);
    c.add_quantity("check_min", check_min);
    if (!(check_min > 0.0)) c.fail("W U e > 0 violated");
  } else {
    if (!(dom_max < 0.0)) c.fail("phi2 < D_phi1 violated");
    double check_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double gap = b.phi2[i] - b.phi1[i] * adiag[static_cast<std::size_t>(i)];
      check_min = std::min(check_min, gap * u[i] + wu[static_cast<std::size_t>(i)]);
    }
    c.add_quantity("check_min", check_min);
    if (!(check_min > 0.0)) c.fail("(phi2 - D_phi1) U e + W U e > 0 violated");
  }
  return c;
}

}  // namespace icpkit
