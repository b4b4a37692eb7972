#pragma once

/// @file problem.hpp
/// @brief Implicit complementarity problem data: find z with
///        A z + q >= 0,  z - psi(z) >= 0,  (A z + q)^T (z - psi(z)) = 0.
///
/// psi = 0 recovers the linear complementarity problem LCP(q, A).

#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// PsiMap
// ---------------------------------------------------------------------------

/// The implicit obstacle map psi. Supported shapes: zero, constant vector d,
/// and affine z -> C z + d. Each instance carries an entrywise-nonnegative
/// Lipschitz bound G with |psi(x) - psi(y)| <= G |x - y| componentwise
/// (G = |C| by default for the affine shape, zero otherwise).
class PsiMap {
 public:
  enum class Kind { zero, constant, affine };

  static PsiMap zero(int n) {
    PsiMap m;
    m.kind_ = Kind::zero;
    m.n_ = n;
    m.g_ = Matrix::csr_zero(n);
    return m;
  }

  static PsiMap constant(Vec d) {
    PsiMap m;
    m.kind_ = Kind::constant;
    m.n_ = static_cast<int>(d.size());
    if (m.n_ == 0) throw std::invalid_argument("PsiMap::constant: empty vector");
    m.d_ = std::move(d);
    m.g_ = Matrix::csr_zero(m.n_);
    return m;
  }

  static PsiMap affine(Matrix c, Vec d) {
    Matrix g = entrywise_abs(c);
    return affine(std::move(c), std::move(d), std::move(g));
  }

  /// Affine map with an explicit Lipschitz bound; requires G >= 0 and |C| <= G.
  static PsiMap affine(Matrix c, Vec d, Matrix g) {
    if (c.n() != static_cast<int>(d.size()) || c.n() != g.n())
      throw std::invalid_argument("PsiMap::affine: dimension mismatch");
    bool ok = true;
    g.for_each_entry([&](int, int, double v) {
      if (!(v >= 0.0)) ok = false;
    });
    if (!ok) throw std::invalid_argument("PsiMap::affine: G must be entrywise nonnegative");
    c.for_each_entry([&](int i, int j, double v) {
      if (!(std::abs(v) <= g.at(i, j))) ok = false;
    });
    if (!ok) throw std::invalid_argument("PsiMap::affine: |C| <= G violated");
    PsiMap m;
    m.kind_ = Kind::affine;
    m.n_ = c.n();
    m.c_ = std::move(c);
    m.d_ = std::move(d);
    m.g_ = std::move(g);
    return m;
  }

  Kind kind() const { return kind_; }
  int size() const { return n_; }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::zero: return "zero";
      case Kind::constant: return "constant";
      case Kind::affine: return "affine";
    }
    return "unknown";
  }

  Vec eval(std::span<const double> z) const {
    if (static_cast<int>(z.size()) != n_)
      throw std::invalid_argument("PsiMap::eval: dimension mismatch");
    switch (kind_) {
      case Kind::zero: return zeros(n_);
      case Kind::constant: return d_;
      case Kind::affine: {
        Vec y = c_->matvec(z);
        for (int i = 0; i < n_; ++i) y[static_cast<std::size_t>(i)] += d_[static_cast<std::size_t>(i)];
        return y;
      }
    }
    return zeros(n_);
  }

  /// Componentwise Lipschitz bound; zero matrix for zero/constant shapes.
  const Matrix& lipschitz_G() const { return g_; }

  const Matrix& C() const {
    if (kind_ != Kind::affine) throw std::invalid_argument("PsiMap::C: not an affine map");
    return *c_;
  }

  const Vec& d() const {
    if (kind_ == Kind::zero) throw std::invalid_argument("PsiMap::d: zero map has no offset");
    return d_;
  }

 private:
  Kind kind_ = Kind::zero;
  int n_ = 0;
  std::optional<Matrix> c_;
  Vec d_;
  Matrix g_;
};

inline Vec eval_psi(const PsiMap& psi, std::span<const double> z) { return psi.eval(z); }

// ---------------------------------------------------------------------------
// IcpProblem
// ---------------------------------------------------------------------------

/// Problem bundle ICP(q, A, psi). Dimensions are validated at construction.
class IcpProblem {
 public:
  IcpProblem(Matrix a, Vec q, PsiMap psi)
      : a_(std::move(a)), q_(std::move(q)), psi_(std::move(psi)) {
    if (a_.n() != static_cast<int>(q_.size()) || a_.n() != psi_.size())
      throw std::invalid_argument("IcpProblem: dimension mismatch between A, q, psi");
  }

  /// LCP(q, A) convenience: psi = 0.
  static IcpProblem lcp(Matrix a, Vec q) {
    const int n = a.n();
    return IcpProblem(std::move(a), std::move(q), PsiMap::zero(n));
  }

  int n() const { return a_.n(); }
  const Matrix& A() const { return a_; }
  const Vec& q() const { return q_; }
  const PsiMap& psi() const { return psi_; }

  /// p(z) = A z + q.
  Vec p_value(std::span<const double> z) const {
    Vec p = a_.matvec(z);
    for (int i = 0; i < n(); ++i) p[static_cast<std::size_t>(i)] += q_[static_cast<std::size_t>(i)];
    return p;
  }

  /// r(z) = z - psi(z).
  Vec r_value(std::span<const double> z) const {
    Vec y = psi_.eval(z);
    Vec r(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i)
      r[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
    return r;
  }

 private:
  Matrix a_;
  Vec q_;
  PsiMap psi_;
};

// ---------------------------------------------------------------------------
// Residuals and certification
// ---------------------------------------------------------------------------

/// Res(z) = || min(z - psi(z), A z + q) ||_2, the natural residual.
inline double residual(const IcpProblem& prob, std::span<const double> z) {
  const Vec p = prob.p_value(z);
  const Vec r = prob.r_value(z);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = std::min(r[i], p[i]);
    s += m * m;
  }
  return std::sqrt(s);
}

/// Residual of the modulus fixed-point form
///   (phi1 A + phi2) z = |(phi1 A - phi2) z + phi1 q + phi2 psi(z)| + phi2 psi(z) - phi1 q
/// in the infinity norm; algebraically equal to 2 || min(phi1 p, phi2 r) ||_inf.
inline double fixed_point_residual(const IcpProblem& prob, std::span<const double> z,
                                   const DiagonalMatrix& phi1, const DiagonalMatrix& phi2) {
  if (phi1.size() != prob.n() || phi2.size() != prob.n())
    throw std::invalid_argument("fixed_point_residual: dimension mismatch");
  phi1.require_strictly_positive("phi1");
  phi2.require_strictly_positive("phi2");
  const Vec p = prob.p_value(z);
  const Vec r = prob.r_value(z);
  double m = 0.0;
  for (int i = 0; i < prob.n(); ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    m = std::max(m, std::abs(2.0 * std::min(phi1[i] * p[u], phi2[i] * r[u])));
  }
  return m;
}

inline double fixed_point_residual(const IcpProblem& prob, std::span<const double> z) {
  const DiagonalMatrix id = DiagonalMatrix::identity(prob.n());
  return fixed_point_residual(prob, z, id, id);
}

/// Feasibility and complementarity report for a candidate point.
struct SolutionCheck {
  Vec p;                           // A z + q
  Vec r;                           // z - psi(z)
  double min_violation = 0.0;  // max(0, -min_i p_i, -min_i r_i); 0 iff feasible
  double complementarity_gap = 0.0;  // || (p + r) - |p - r| ||_inf, zero iff complementary
  bool is_solution = false;
};

/// Certify z as a solution within tol: componentwise feasibility down to -tol
/// and complementarity gap at most tol. The gap uses the modulus identity
/// x + y - |x - y| = 2 min(x, y), which vanishes exactly on complementary
/// nonnegative pairs.
inline SolutionCheck certify_solution(const IcpProblem& prob, std::span<const double> z,
                                      double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("certify_solution: tol must be >= 0");
  SolutionCheck out;
  out.p = prob.p_value(z);
  out.r = prob.r_value(z);
  double viol = 0.0;
  double gap = 0.0;
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    viol = std::max({viol, -out.p[i], -out.r[i]});
    gap = std::max(gap, std::abs((out.p[i] + out.r[i]) - std::abs(out.p[i] - out.r[i])));
  }
  out.min_violation = viol;
  out.complementarity_gap = gap;
  out.is_solution = (viol <= tol) && (gap <= tol);
  return out;
}

}  // namespace icpkit
