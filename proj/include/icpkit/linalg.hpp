#pragma once

/// @file linalg.hpp
/// @brief Matrix-class predicates, linear solvers, and the nonnegative
///        spectral-radius estimator.
///
/// Class predicates use strict comparisons with no epsilon slack: they back
/// convergence certificates, and a certificate that holds only by rounding
/// noise is worthless. Borderline handling is the caller's concern.

#include "icpkit/errors.hpp"
#include "icpkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// Dense LU with partial pivoting
// ---------------------------------------------------------------------------

/// Factors a copy of A once; solves repeatedly. Throws singular_system_error
/// when the best available pivot is zero to working precision relative to the
/// magnitude of the original matrix.
class DenseLu {
 public:
  explicit DenseLu(const Matrix& a) : n_(a.n()), lu_(a.to_dense().values()), piv_(a.n()) {
    const double scale = max_abs_entry(a);
    const double tol =
        scale * static_cast<double>(n_) * std::numeric_limits<double>::epsilon();
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double best = std::abs(entry(k, k));
      for (int i = k + 1; i < n_; ++i) {
        const double cand = std::abs(entry(i, k));
        if (cand > best) {
          best = cand;
          p = i;
        }
      }
      if (!(best > tol))
        throw singular_system_error("matrix is singular to working precision");
      piv_[k] = p;
      if (p != k)
        for (int j = 0; j < n_; ++j) std::swap(entry(k, j), entry(p, j));
      const double inv = 1.0 / entry(k, k);
      for (int i = k + 1; i < n_; ++i) {
        const double f = entry(i, k) * inv;
        entry(i, k) = f;
        if (f == 0.0) continue;
        for (int j = k + 1; j < n_; ++j) entry(i, j) -= f * entry(k, j);
      }
    }
  }

  int n() const { return n_; }

  Vec solve(Vec b) const {
    if (static_cast<int>(b.size()) != n_)
      throw std::invalid_argument("solve: dimension mismatch");
    for (int k = 0; k < n_; ++k)
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    for (int i = 1; i < n_; ++i) {
      double s = b[i];
      for (int j = 0; j < i; ++j) s -= entry(i, j) * b[j];
      b[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = b[i];
      for (int j = i + 1; j < n_; ++j) s -= entry(i, j) * b[j];
      b[i] = s / entry(i, i);
    }
    return b;
  }

 private:
  double& entry(int i, int j) {
    return lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j)];
  }
  double entry(int i, int j) const {
    return lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j)];
  }

  int n_;
  Vec lu_;
  std::vector<int> piv_;
};

// ---------------------------------------------------------------------------
// SystemSolver: factor once, solve per iteration
// ---------------------------------------------------------------------------

/// Reusable solver for the per-iteration linear system. Detects permuted
/// triangular structure (each elimination step exposes a row with a single
/// unresolved entry) and solves it by substitution in O(nnz); anything else
/// falls back to a dense LU factored once at construction.
class SystemSolver {
 public:
  explicit SystemSolver(Matrix a) : a_(std::move(a)), n_(a_.n()) {
    if (!try_triangular()) lu_.emplace(a_);
  }

  int n() const { return n_; }
  bool used_triangular_path() const { return !order_.empty(); }

  Vec solve(Vec b) const {
    if (static_cast<int>(b.size()) != n_)
      throw std::invalid_argument("solve: dimension mismatch");
    if (!used_triangular_path()) return lu_->solve(std::move(b));
    Vec x(static_cast<std::size_t>(n_), 0.0);
    for (const auto& [i, j] : order_) {
      double s = b[static_cast<std::size_t>(i)];
      double diag = 0.0;
      a_.for_each_in_row(i, [&](int k, double v) {
        if (k == j)
          diag = v;
        else
          s -= v * x[static_cast<std::size_t>(k)];
      });
      x[static_cast<std::size_t>(j)] = s / diag;
    }
    return x;
  }

 private:
  bool try_triangular() {
    // Peel rows with exactly one unresolved nonzero; track the unresolved
    // column of each row as the running sum of its unresolved column indices.
    std::vector<int> count(static_cast<std::size_t>(n_), 0);
    std::vector<std::int64_t> colsum(static_cast<std::size_t>(n_), 0);
    std::vector<std::vector<int>> rows_of_col(static_cast<std::size_t>(n_));
    a_.for_each_entry([&](int i, int j, double v) {
      if (v == 0.0) return;
      ++count[static_cast<std::size_t>(i)];
      colsum[static_cast<std::size_t>(i)] += j;
      rows_of_col[static_cast<std::size_t>(j)].push_back(i);
    });
    std::vector<int> stack;
    std::vector<char> row_done(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i)
      if (count[static_cast<std::size_t>(i)] == 1) stack.push_back(i);
    order_.reserve(static_cast<std::size_t>(n_));
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      if (row_done[static_cast<std::size_t>(i)] || count[static_cast<std::size_t>(i)] != 1)
        continue;
      row_done[static_cast<std::size_t>(i)] = 1;
      const int j = static_cast<int>(colsum[static_cast<std::size_t>(i)]);
      order_.push_back({i, j});
      for (int r : rows_of_col[static_cast<std::size_t>(j)]) {
        if (row_done[static_cast<std::size_t>(r)]) continue;
        --count[static_cast<std::size_t>(r)];
        colsum[static_cast<std::size_t>(r)] -= j;
        if (count[static_cast<std::size_t>(r)] == 1) stack.push_back(r);
      }
    }
    if (static_cast<int>(order_.size()) != n_) {
      order_.clear();
      return false;
    }
    return true;
  }

  Matrix a_;
  int n_;
  std::vector<std::pair<int, int>> order_;  // (row, pivot column) in solve order
  std::optional<DenseLu> lu_;
};

/// One-shot linear solve.
inline Vec solve_linear(const Matrix& a, Vec b) { return SystemSolver(a).solve(std::move(b)); }

// ---------------------------------------------------------------------------
// Matrix-class predicates
// ---------------------------------------------------------------------------

/// Comparison matrix: diagonal |a_ii|, off-diagonal -|a_ij|.
inline Matrix comparison_matrix(const Matrix& a) {
  return map_entries(a, [](int i, int j, double v) {
    return i == j ? std::abs(v) : -std::abs(v);
  });
}

/// Strict diagonal dominance by rows: |a_ii| > sum_{j != i} |a_ij| for all i.
inline bool is_sdd(const Matrix& a) {
  Vec diag_abs(static_cast<std::size_t>(a.n()), 0.0);
  Vec off_sum(static_cast<std::size_t>(a.n()), 0.0);
  a.for_each_entry([&](int i, int j, double v) {
    if (i == j)
      diag_abs[static_cast<std::size_t>(i)] = std::abs(v);
    else
      off_sum[static_cast<std::size_t>(i)] += std::abs(v);
  });
  for (int i = 0; i < a.n(); ++i)
    if (!(diag_abs[static_cast<std::size_t>(i)] > off_sum[static_cast<std::size_t>(i)]))
      return false;
  return true;
}

/// Z-matrix: off-diagonal entries all <= 0.
inline bool is_z_matrix(const Matrix& a) {
  bool z = true;
  a.for_each_entry([&](int i, int j, double v) {
    if (i != j && v > 0.0) z = false;
  });
  return z;
}

/// Outcome of the nonsingular-M-matrix test.
struct MMatrixCheck {
  enum class Reason { ok, not_z_matrix, singular, solution_not_positive };
  bool is_m = false;
  Reason reason = Reason::ok;
  Vec x;  // solution of A x = e when the solve succeeded

  std::string reason_text() const {
    switch (reason) {
      case Reason::ok: return "ok";
      case Reason::not_z_matrix: return "not a Z-matrix";
      case Reason::singular: return "singular to working precision";
      case Reason::solution_not_positive: return "A x = e solution is not strictly positive";
    }
    return "unknown";
  }
};

/// Nonsingular M-matrix test: Z-pattern plus A x = e solvable with x > 0.
/// A singular A is a definite negative (reason = singular), not an error.
inline MMatrixCheck check_m_matrix(const Matrix& a) {
  MMatrixCheck r;
  if (!is_z_matrix(a)) {
    r.reason = MMatrixCheck::Reason::not_z_matrix;
    return r;
  }
  Vec x;
  try {
    x = solve_linear(a, ones(a.n()));
  } catch (const singular_system_error&) {
    r.reason = MMatrixCheck::Reason::singular;
    return r;
  }
  for (double v : x) {
    if (!(v > 0.0)) {
      r.reason = MMatrixCheck::Reason::solution_not_positive;
      r.x = std::move(x);
      return r;
    }
  }
  r.is_m = true;
  r.x = std::move(x);
  return r;
}

inline bool is_m_matrix(const Matrix& a) { return check_m_matrix(a).is_m; }

/// H-matrix with positive diagonal: comparison matrix is a nonsingular
/// M-matrix and a_ii > 0 for all i.
inline bool is_h_plus_matrix(const Matrix& a) {
  const Vec d = diagonal_of(a);
  for (double v : d)
    if (!(v > 0.0)) return false;
  return is_m_matrix(comparison_matrix(a));
}

namespace detail {

/// Determinant of the principal submatrix selected by mask bits, by LU with
/// partial pivoting. Returns 0 when elimination hits an exactly zero column.
inline double principal_minor(const Matrix& a, std::uint32_t mask, std::vector<int>& idx,
                              Vec& sub) {
  idx.clear();
  for (int i = 0; i < a.n(); ++i)
    if (mask & (1u << i)) idx.push_back(i);
  const int m = static_cast<int>(idx.size());
  sub.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      sub[static_cast<std::size_t>(i) * m + j] = a.at(idx[i], idx[j]);
  double det = 1.0;
  for (int k = 0; k < m; ++k) {
    int p = k;
    double best = std::abs(sub[static_cast<std::size_t>(k) * m + k]);
    for (int i = k + 1; i < m; ++i) {
      const double cand = std::abs(sub[static_cast<std::size_t>(i) * m + k]);
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (p != k) {
      for (int j = 0; j < m; ++j)
        std::swap(sub[static_cast<std::size_t>(k) * m + j], sub[static_cast<std::size_t>(p) * m + j]);
      det = -det;
    }
    const double piv = sub[static_cast<std::size_t>(k) * m + k];
    det *= piv;
    for (int i = k + 1; i < m; ++i) {
      const double f = sub[static_cast<std::size_t>(i) * m + k] / piv;
      if (f == 0.0) continue;
      for (int j = k + 1; j < m; ++j)
        sub[static_cast<std::size_t>(i) * m + j] -= f * sub[static_cast<std::size_t>(k) * m + j];
    }
  }
  return det;
}

}  // namespace detail

inline constexpr int kPMatrixDimensionCap = 16;

/// P-matrix test: every principal minor strictly positive, checked by
/// exhaustive enumeration of the 2^n - 1 nonempty principal submatrices.
/// Dimensions above the cap throw dimension_limit_error.
inline bool is_p_matrix(const Matrix& a, int dimension_cap = kPMatrixDimensionCap) {
  if (a.n() > dimension_cap || a.n() > 30)
    throw dimension_limit_error("is_p_matrix: dimension " + std::to_string(a.n()) +
                                " exceeds exhaustive-enumeration cap " +
                                std::to_string(std::min(dimension_cap, 30)));
  std::vector<int> idx;
  Vec sub;
  const std::uint32_t total = (1u << a.n());
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    if (!(detail::principal_minor(a, mask, idx, sub) > 0.0)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Spectral radius of a nonnegative matrix
// ---------------------------------------------------------------------------

struct SpectralRadiusResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration for entrywise-nonnegative A. Runs on the shifted matrix
/// A + I from a positive start (the shift separates the dominant eigenvalue
/// of periodic patterns), after an exact nilpotency probe: a nonnegative
/// nilpotent matrix annihilates every vector structurally, with no rounding,
/// so the zero radius is returned exactly. Non-convergence returns the last
/// estimate with converged = false.
inline SpectralRadiusResult spectral_radius_nonneg(const Matrix& a, double tol = 1e-10,
                                                   int max_iter = 10000) {
  bool nonneg = true;
  a.for_each_entry([&](int, int, double v) {
    if (v < 0.0 || std::isnan(v)) nonneg = false;
  });
  if (!nonneg)
    throw std::invalid_argument("spectral_radius_nonneg: matrix has a negative entry");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_radius_nonneg: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("spectral_radius_nonneg: max_iter must be >= 1");
  const int n = a.n();

  Vec x = ones(n);
  for (int t = 0; t <= n; ++t) {
    x = a.matvec(x);
    const double norm = inf_norm(x);
    if (norm == 0.0) return {0.0, true, t + 1};
    for (double& v : x) v /= norm;
  }

  x = ones(n);
  double lambda = 0.0;
  int small_changes = 0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec y = a.matvec(x);
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    const double norm = inf_norm(y);
    const double prev = lambda;
    lambda = norm;  // x is normalized to unit inf-norm, so |y|_inf estimates rho(A + I)
    for (double& v : y) v /= norm;
    x = std::move(y);
    if (it > 1 && std::abs(lambda - prev) <= tol * std::max(1.0, std::abs(lambda))) {
      if (++small_changes >= 2) return {lambda - 1.0, true, it};
    } else {
      small_changes = 0;
    }
  }
  return {lambda - 1.0, false, max_iter};
}

// ---------------------------------------------------------------------------
// Diagonal scaling of M-matrices
// ---------------------------------------------------------------------------

/// U = diag(u) with u = A^-1 e for a nonsingular M-matrix A; A U is then
/// strictly diagonally dominant with every row sum equal to 1.
inline DiagonalMatrix sdd_scaling(const Matrix& a) {
  MMatrixCheck chk = check_m_matrix(a);
  if (!chk.is_m)
    throw std::invalid_argument("sdd_scaling requires a nonsingular M-matrix (" +
                                chk.reason_text() + ")");
  return DiagonalMatrix(std::move(chk.x));
}

/// Bound max_i sum_j |(A^-1 E)_ij| <= max_i (sum_j |e_ij|) / (|a_ii| - sum_{j != i} |a_ij|)
/// for strictly diagonally dominant A. Errors when A is not sdd.
inline double sdd_inverse_bound(const Matrix& a, const Matrix& e) {
  if (a.n() != e.n()) throw std::invalid_argument("sdd_inverse_bound: dimension mismatch");
  if (!is_sdd(a))
    throw std::invalid_argument("sdd_inverse_bound requires strict diagonal dominance");
  Vec margin(static_cast<std::size_t>(a.n()), 0.0);
  a.for_each_entry([&](int i, int j, double v) {
    margin[static_cast<std::size_t>(i)] += (i == j) ? std::abs(v) : -std::abs(v);
  });
  Vec esum(static_cast<std::size_t>(e.n()), 0.0);
  e.for_each_entry([&](int i, int, double v) { esum[static_cast<std::size_t>(i)] += std::abs(v); });
  double bound = 0.0;
  for (int i = 0; i < a.n(); ++i)
    bound = std::max(bound, esum[static_cast<std::size_t>(i)] / margin[static_cast<std::size_t>(i)]);
  return bound;
}

}  // namespace icpkit
