#pragma once

/// @file splitting.hpp
/// @brief Splitting schemes A = (M1 + phi) - (N1 + phi) and their scaled
///        build products used by the modulus iteration.
///
/// The build scales by the positive diagonal phi1 (M_phi1 = phi1 M1 and so
/// on) and assembles system_matrix = M_phi1 + phi_phi1 + phi2, the matrix
/// factored once per solve.
///
/// Preset catalogue (D, L, U from A = D - L - U, where L and U are the
/// negated strict triangles of A):
///   mnmod          M1 = A, N1 = 0, phi1 = phi2 = I
///   mnmmod(t1)     M1 = A, N1 = 0, phi1 = I, phi2 = t1 I
///   mnmaor(t1,t2)  M1 = (1/t1)(D - t2 L), N1 = (1/t1)((1-t1) D + (t1-t2) L + t1 U)
///   mnmsor(t)      = mnmaor(t, t)
///   mnmgs          = mnmaor(1, 1)
///   mnmj           = mnmaor(1, 0)
///   custom         M1, N1 caller-supplied with M1 - N1 = A exactly

#include "icpkit/matrix.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// SplittingScheme
// ---------------------------------------------------------------------------

struct SplittingScheme {
  enum class Method { mnmod, mnmmod, mnmaor, mnmsor, mnmgs, mnmj, custom };

  Method method = Method::mnmod;
  double theta1 = 1.0;
  double theta2 = 1.0;
  std::optional<DiagonalMatrix> phi;   // default 0
  std::optional<DiagonalMatrix> phi1;  // default I (mnmod/mnmmod force I)
  std::optional<DiagonalMatrix> phi2;  // default I (mnmod/mnmmod force their own)
  std::optional<Matrix> M1;            // custom only
  std::optional<Matrix> N1;            // custom only
  /// strict = true rejects user diagonals that a preset would override;
  /// strict = false silently applies the preset's forced values.
  bool strict = false;

  static SplittingScheme mnmod() { return SplittingScheme{}; }

  static SplittingScheme mnmmod(double theta1) {
    SplittingScheme s;
    s.method = Method::mnmmod;
    s.theta1 = theta1;
    return s;
  }

  static SplittingScheme mnmaor(double theta1, double theta2) {
    SplittingScheme s;
    s.method = Method::mnmaor;
    s.theta1 = theta1;
    s.theta2 = theta2;
    return s;
  }

  static SplittingScheme mnmsor(double theta) {
    SplittingScheme s;
    s.method = Method::mnmsor;
    s.theta1 = theta;
    s.theta2 = theta;
    return s;
  }

  static SplittingScheme mnmgs() {
    SplittingScheme s;
    s.method = Method::mnmgs;
    s.theta1 = 1.0;
    s.theta2 = 1.0;
    return s;
  }

  static SplittingScheme mnmj() {
    SplittingScheme s;
    s.method = Method::mnmj;
    s.theta1 = 1.0;
    s.theta2 = 0.0;
    return s;
  }

  static SplittingScheme custom(Matrix m1, Matrix n1) {
    SplittingScheme s;
    s.method = Method::custom;
    s.M1 = std::move(m1);
    s.N1 = std::move(n1);
    return s;
  }

  SplittingScheme& with_phi(DiagonalMatrix d) {
    phi = std::move(d);
    return *this;
  }
  SplittingScheme& with_phi1(DiagonalMatrix d) {
    phi1 = std::move(d);
    return *this;
  }
  SplittingScheme& with_phi2(DiagonalMatrix d) {
    phi2 = std::move(d);
    return *this;
  }
  SplittingScheme& with_strict(bool s) {
    strict = s;
    return *this;
  }
};

inline std::string method_name(SplittingScheme::Method m) {
  switch (m) {
    case SplittingScheme::Method::mnmod: return "mnmod";
    case SplittingScheme::Method::mnmmod: return "mnmmod";
    case SplittingScheme::Method::mnmaor: return "mnmaor";
    case SplittingScheme::Method::mnmsor: return "mnmsor";
    case SplittingScheme::Method::mnmgs: return "mnmgs";
    case SplittingScheme::Method::mnmj: return "mnmj";
    case SplittingScheme::Method::custom: return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// BuiltSplitting
// ---------------------------------------------------------------------------

/// Splitting data ready for iteration. Unscaled parts satisfy
/// (M1 + phi) - (N1 + phi) = A; scaled parts are the phi1-multiples; and
/// system_matrix = (M_phi1 + phi_phi1) + phi2 summed left to right.
struct BuiltSplitting {
  Matrix M1;
  Matrix N1;
  DiagonalMatrix phi;
  Matrix M_phi1;
  Matrix N_phi1;
  Matrix A_phi1;
  DiagonalMatrix phi_phi1;
  DiagonalMatrix phi1;
  DiagonalMatrix phi2;
  Matrix system_matrix;
};

namespace detail {

/// AOR-family splitting parts on A's pattern. Entries:
///   M1: diag a_ii/t1, strict lower (t2/t1) a_ij
///   N1: diag ((1-t1)/t1) a_ii, strict lower ((t2-t1)/t1) a_ij, strict upper -a_ij
inline std::pair<Matrix, Matrix> aor_parts(const Matrix& a, double t1, double t2) {
  if (!(t1 > 0.0))
    throw std::invalid_argument("AOR-family splitting requires theta1 > 0");
  {
    const Vec d = diagonal_of(a);
    for (double v : d)
      if (v == 0.0)
        throw std::invalid_argument(
            "AOR-family splitting requires a nonzero diagonal in A");
  }
  const double cm_low = t2 / t1;
  const double cn_diag = (1.0 - t1) / t1;
  const double cn_low = (t2 - t1) / t1;
  if (a.is_dense()) {
    Matrix m1 = Matrix::dense(a.n());
    Matrix n1 = Matrix::dense(a.n());
    a.for_each_entry([&](int i, int j, double v) {
      if (i == j) {
        m1.dense_at(i, j) = v / t1;
        n1.dense_at(i, j) = cn_diag * v;
      } else if (i > j) {
        m1.dense_at(i, j) = cm_low * v;
        n1.dense_at(i, j) = cn_low * v;
      } else {
        n1.dense_at(i, j) = -v;
      }
    });
    return {std::move(m1), std::move(n1)};
  }
  std::vector<Triplet> tm, tn;
  tm.reserve(a.stored_entries());
  tn.reserve(a.stored_entries());
  a.for_each_entry([&](int i, int j, double v) {
    if (i == j) {
      tm.push_back({i, j, v / t1});
      tn.push_back({i, j, cn_diag * v});
    } else if (i > j) {
      tm.push_back({i, j, cm_low * v});
      tn.push_back({i, j, cn_low * v});
    } else {
      tn.push_back({i, j, -v});
    }
  });
  return {Matrix::from_triplets(a.n(), std::move(tm), Matrix::Storage::csr),
          Matrix::from_triplets(a.n(), std::move(tn), Matrix::Storage::csr)};
}

inline Matrix zero_like(const Matrix& a) {
  return a.is_dense() ? Matrix::dense(a.n()) : Matrix::csr_zero(a.n());
}

inline void apply_forced_diagonal(std::optional<DiagonalMatrix>& slot,
                                  const DiagonalMatrix& forced, bool strict,
                                  const std::string& what) {
  if (slot && strict) {
    bool same = slot->size() == forced.size();
    for (int i = 0; same && i < forced.size(); ++i) same = ((*slot)[i] == forced[i]);
    if (!same)
      throw std::invalid_argument(what + " is fixed by this method; remove the override or "
                                         "drop strict mode");
  }
  slot = forced;
}

}  // namespace detail

/// Assemble the scaled splitting for A under the given scheme.
inline BuiltSplitting build(SplittingScheme scheme, const Matrix& a) {
  using Method = SplittingScheme::Method;
  const int n = a.n();

  if (scheme.method != Method::custom && (scheme.M1 || scheme.N1))
    throw std::invalid_argument("M1/N1 are only valid with the custom method");

  switch (scheme.method) {
    case Method::mnmod:
      detail::apply_forced_diagonal(scheme.phi1, DiagonalMatrix::identity(n), scheme.strict,
                                    "phi1");
      detail::apply_forced_diagonal(scheme.phi2, DiagonalMatrix::identity(n), scheme.strict,
                                    "phi2");
      scheme.M1 = a;
      scheme.N1 = detail::zero_like(a);
      break;
    case Method::mnmmod:
      if (!(scheme.theta1 > 0.0))
        throw std::invalid_argument("mnmmod requires theta1 > 0");
      detail::apply_forced_diagonal(scheme.phi1, DiagonalMatrix::identity(n), scheme.strict,
                                    "phi1");
      detail::apply_forced_diagonal(scheme.phi2, DiagonalMatrix::uniform(n, scheme.theta1),
                                    scheme.strict, "phi2");
      scheme.M1 = a;
      scheme.N1 = detail::zero_like(a);
      break;
    case Method::mnmaor:
    case Method::mnmsor:
    case Method::mnmgs:
    case Method::mnmj: {
      auto [m1, n1] = detail::aor_parts(a, scheme.theta1, scheme.theta2);
      scheme.M1 = std::move(m1);
      scheme.N1 = std::move(n1);
      break;
    }
    case Method::custom: {
      if (!scheme.M1 || !scheme.N1)
        throw std::invalid_argument("custom method requires both M1 and N1");
      if (scheme.M1->n() != n || scheme.N1->n() != n)
        throw std::invalid_argument("custom splitting dimension mismatch");
      if (!entrywise_equal(subtract(*scheme.M1, *scheme.N1), a, 0.0))
        throw std::invalid_argument("inconsistent splitting: M1 - N1 != A");
      break;
    }
  }

  BuiltSplitting out;
  out.M1 = std::move(*scheme.M1);
  out.N1 = std::move(*scheme.N1);
  out.phi = scheme.phi.value_or(DiagonalMatrix::uniform(n, 0.0));
  out.phi1 = scheme.phi1.value_or(DiagonalMatrix::identity(n));
  out.phi2 = scheme.phi2.value_or(DiagonalMatrix::identity(n));
  if (out.phi.size() != n || out.phi1.size() != n || out.phi2.size() != n)
    throw std::invalid_argument("diagonal parameter dimension mismatch");
  out.phi1.require_strictly_positive("phi1");
  out.phi2.require_strictly_positive("phi2");

  out.M_phi1 = scale_rows(out.phi1, out.M1);
  out.N_phi1 = scale_rows(out.phi1, out.N1);
  out.A_phi1 = scale_rows(out.phi1, a);
  {
    Vec pp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pp[static_cast<std::size_t>(i)] = out.phi1[i] * out.phi[i];
    out.phi_phi1 = DiagonalMatrix(std::move(pp));
  }
  out.system_matrix = add_diagonal(add_diagonal(out.M_phi1, out.phi_phi1), out.phi2);
  return out;
}

/// Build matching the plain modulus family: phi1 = I, phi = 0, splitting and
/// phi2 caller-supplied.
inline BuiltSplitting nmms_compat(const Matrix& a, Matrix m1, Matrix n1,
                                  DiagonalMatrix phi2) {
  SplittingScheme s = SplittingScheme::custom(std::move(m1), std::move(n1));
  s.with_phi(DiagonalMatrix::uniform(a.n(), 0.0))
      .with_phi1(DiagonalMatrix::identity(a.n()))
      .with_phi2(std::move(phi2));
  return build(std::move(s), a);
}

}  // namespace icpkit
