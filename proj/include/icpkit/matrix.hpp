#pragma once

/// @file matrix.hpp
/// @brief Square matrix value types (dense row-major and CSR) and the small
///        vector helpers used throughout the library.
///
/// Both storages model the same mathematical object; every algorithm in the
/// library accepts either and the two paths must agree entrywise. CSR data is
/// validated on construction: row offsets nondecreasing, column indices
/// strictly increasing within each row (hence no duplicates), all indices in
/// range.

#include "icpkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline Vec ones(int n) { return Vec(static_cast<std::size_t>(n), 1.0); }

inline Vec zeros(int n) { return Vec(static_cast<std::size_t>(n), 0.0); }

inline Vec unit_vector(int n, int i) {
  Vec e(static_cast<std::size_t>(n), 0.0);
  e.at(static_cast<std::size_t>(i)) = 1.0;
  return e;
}

inline Vec vec_add(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec vec_sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec vec_abs(std::span<const double> a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::abs(a[i]);
  return r;
}

inline double max_entry(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

inline double min_entry(std::span<const double> v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

// ---------------------------------------------------------------------------
// DiagonalMatrix
// ---------------------------------------------------------------------------

/// Diagonal matrix stored as its diagonal vector.
class DiagonalMatrix {
 public:
  DiagonalMatrix() = default;

  explicit DiagonalMatrix(Vec d) : d_(std::move(d)) {}

  static DiagonalMatrix uniform(int n, double value) {
    return DiagonalMatrix(Vec(static_cast<std::size_t>(n), value));
  }

  static DiagonalMatrix identity(int n) { return uniform(n, 1.0); }

  int size() const { return static_cast<int>(d_.size()); }

  double operator[](int i) const { return d_[static_cast<std::size_t>(i)]; }

  const Vec& diag() const { return d_; }

  bool is_strictly_positive() const {
    for (double x : d_)
      if (!(x > 0.0)) return false;
    return true;
  }

  /// True when every entry equals the first (reported in manifests as scalar:v).
  bool is_uniform() const {
    for (double x : d_)
      if (x != d_.front()) return false;
    return !d_.empty();
  }

  void require_strictly_positive(const std::string& what) const {
    if (!is_strictly_positive())
      throw std::invalid_argument(what + " must have strictly positive diagonal entries");
  }

 private:
  Vec d_;
};

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Entry of a coordinate (triplet) list.
struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Square matrix in dense row-major or CSR storage.
class Matrix {
 public:
  enum class Storage { dense, csr };

  Matrix() = default;

  // ---- constructors ----

  /// Dense zero matrix.
  static Matrix dense(int n) {
    check_dim(n);
    Matrix a;
    a.n_ = n;
    a.storage_ = Storage::dense;
    a.values_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    return a;
  }

  /// Dense matrix from row-major values (size must be n*n).
  static Matrix dense(int n, Vec values) {
    check_dim(n);
    if (values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
      throw std::invalid_argument("dense matrix needs n*n values");
    Matrix a;
    a.n_ = n;
    a.storage_ = Storage::dense;
    a.values_ = std::move(values);
    return a;
  }

  static Matrix identity(int n) {
    Matrix a = dense(n);
    for (int i = 0; i < n; ++i) a.dense_at(i, i) = 1.0;
    return a;
  }

  /// CSR matrix from raw arrays; validates the storage invariants.
  static Matrix csr(int n, std::vector<int> row_offsets, std::vector<int> cols, Vec values) {
    check_dim(n);
    if (row_offsets.size() != static_cast<std::size_t>(n) + 1)
      throw std::invalid_argument("csr: row_offsets must have n+1 entries");
    if (row_offsets.front() != 0)
      throw std::invalid_argument("csr: row_offsets must start at 0");
    if (cols.size() != values.size())
      throw std::invalid_argument("csr: cols/values size mismatch");
    if (row_offsets.back() != static_cast<int>(cols.size()))
      throw std::invalid_argument("csr: row_offsets must end at nnz");
    for (int i = 0; i < n; ++i) {
      if (row_offsets[i + 1] < row_offsets[i])
        throw std::invalid_argument("csr: row_offsets must be nondecreasing");
      for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
        if (cols[k] < 0 || cols[k] >= n)
          throw std::invalid_argument("csr: column index out of range");
        if (k > row_offsets[i] && cols[k] <= cols[k - 1])
          throw std::invalid_argument(
              "csr: column indices must be strictly increasing within a row");
      }
    }
    Matrix a;
    a.n_ = n;
    a.storage_ = Storage::csr;
    a.row_offsets_ = std::move(row_offsets);
    a.cols_ = std::move(cols);
    a.values_ = std::move(values);
    return a;
  }

  /// Empty (all-zero) CSR matrix.
  static Matrix csr_zero(int n) {
    check_dim(n);
    return csr(n, std::vector<int>(static_cast<std::size_t>(n) + 1, 0), {}, {});
  }

  static Matrix csr_identity(int n) {
    check_dim(n);
    std::vector<int> offs(static_cast<std::size_t>(n) + 1);
    std::vector<int> cols(static_cast<std::size_t>(n));
    Vec vals(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i <= n; ++i) offs[i] = i;
    for (int i = 0; i < n; ++i) cols[i] = i;
    return csr(n, std::move(offs), std::move(cols), std::move(vals));
  }

  /// Build from a coordinate list. Duplicate (row, col) pairs are rejected.
  static Matrix from_triplets(int n, std::vector<Triplet> entries,
                              Storage storage = Storage::csr) {
    check_dim(n);
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const Triplet& t = entries[k];
      if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
        throw std::invalid_argument("from_triplets: index out of range");
      if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col)
        throw std::invalid_argument("from_triplets: duplicate entry");
    }
    if (storage == Storage::dense) {
      Matrix a = dense(n);
      for (const Triplet& t : entries) a.dense_at(t.row, t.col) = t.value;
      return a;
    }
    std::vector<int> offs(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> cols;
    Vec vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (const Triplet& t : entries) ++offs[static_cast<std::size_t>(t.row) + 1];
    for (int i = 0; i < n; ++i) offs[i + 1] += offs[i];
    for (const Triplet& t : entries) {
      cols.push_back(t.col);
      vals.push_back(t.value);
    }
    return csr(n, std::move(offs), std::move(cols), std::move(vals));
  }

  // ---- basic queries ----

  int n() const { return n_; }
  Storage storage() const { return storage_; }
  bool is_dense() const { return storage_ == Storage::dense; }
  bool is_csr() const { return storage_ == Storage::csr; }

  /// Number of stored entries (n*n for dense).
  std::size_t stored_entries() const { return values_.size(); }

  /// Value at (i, j); zero for CSR positions that are not stored.
  double at(int i, int j) const {
    check_index(i);
    check_index(j);
    if (is_dense()) return values_[dense_index(i, j)];
    const int* first = cols_.data() + row_offsets_[i];
    const int* last = cols_.data() + row_offsets_[i + 1];
    const int* it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return values_[static_cast<std::size_t>(it - cols_.data())];
    return 0.0;
  }

  /// Mutable dense entry (dense storage only).
  double& dense_at(int i, int j) {
    if (!is_dense()) throw std::invalid_argument("dense_at requires dense storage");
    check_index(i);
    check_index(j);
    return values_[dense_index(i, j)];
  }

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& cols() const { return cols_; }
  const Vec& values() const { return values_; }

  // ---- entry iteration ----

  /// Visit stored entries in row-major order as f(i, j, value).
  /// Dense visits all n*n positions; CSR visits stored entries only.
  template <class F>
  void for_each_entry(F&& f) const {
    if (is_dense()) {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) f(i, j, values_[dense_index(i, j)]);
    } else {
      for (int i = 0; i < n_; ++i)
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
          f(i, cols_[k], values_[k]);
    }
  }

  /// Visit stored entries of one row in ascending column order as f(j, value).
  template <class F>
  void for_each_in_row(int i, F&& f) const {
    check_index(i);
    if (is_dense()) {
      for (int j = 0; j < n_; ++j) f(j, values_[dense_index(i, j)]);
    } else {
      for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) f(cols_[k], values_[k]);
    }
  }

  // ---- arithmetic ----

  /// y = A x.
  Vec matvec(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(static_cast<std::size_t>(n_), 0.0);
    if (is_dense()) {
      for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* row = values_.data() + dense_index(i, 0);
        for (int j = 0; j < n_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
      }
    } else {
      for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
          s += values_[k] * x[static_cast<std::size_t>(cols_[k])];
        y[static_cast<std::size_t>(i)] = s;
      }
    }
    return y;
  }

  // ---- conversions ----

  Matrix to_dense() const {
    if (is_dense()) return *this;
    Matrix a = dense(n_);
    for_each_entry([&](int i, int j, double v) { a.dense_at(i, j) = v; });
    return a;
  }

  /// Dense-to-CSR conversion drops exact zeros; CSR stays as stored.
  Matrix to_csr() const {
    if (is_csr()) return *this;
    std::vector<Triplet> ts;
    for_each_entry([&](int i, int j, double v) {
      if (v != 0.0) ts.push_back({i, j, v});
    });
    return from_triplets(n_, std::move(ts), Storage::csr);
  }

  /// Rebuild in the requested storage.
  Matrix with_storage(Storage s) const { return s == Storage::dense ? to_dense() : to_csr(); }

 private:
  static void check_dim(int n) {
    if (n <= 0) throw std::invalid_argument("matrix dimension must be positive");
  }

  void check_index(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("matrix index out of range");
  }

  std::size_t dense_index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }

  int n_ = 0;
  Storage storage_ = Storage::dense;
  std::vector<int> row_offsets_;  // csr only
  std::vector<int> cols_;         // csr only
  Vec values_;                    // dense: n*n row-major; csr: stored values
};

// ---------------------------------------------------------------------------
// Structural matrix operations (storage preserving)
// ---------------------------------------------------------------------------

/// New matrix with the same storage and pattern, value f(i, j, v) per stored entry.
template <class F>
Matrix map_entries(const Matrix& a, F&& f) {
  if (a.is_dense()) {
    Matrix r = Matrix::dense(a.n());
    a.for_each_entry([&](int i, int j, double v) { r.dense_at(i, j) = f(i, j, v); });
    return r;
  }
  Vec vals(a.values().size());
  for (int i = 0; i < a.n(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      vals[static_cast<std::size_t>(k)] = f(i, a.cols()[k], a.values()[k]);
  return Matrix::csr(a.n(), a.row_offsets(), a.cols(), std::move(vals));
}

inline Matrix entrywise_abs(const Matrix& a) {
  return map_entries(a, [](int, int, double v) { return std::abs(v); });
}

inline Matrix scale_entries(const Matrix& a, double s) {
  return map_entries(a, [s](int, int, double v) { return s * v; });
}

/// D * A: scales row i by d_i. Pattern preserving.
inline Matrix scale_rows(const DiagonalMatrix& d, const Matrix& a) {
  if (d.size() != a.n()) throw std::invalid_argument("scale_rows: dimension mismatch");
  return map_entries(a, [&](int i, int, double v) { return d[i] * v; });
}

/// A * D: scales column j by d_j. Pattern preserving.
inline Matrix scale_cols(const Matrix& a, const DiagonalMatrix& d) {
  if (d.size() != a.n()) throw std::invalid_argument("scale_cols: dimension mismatch");
  return map_entries(a, [&](int, int j, double v) { return v * d[j]; });
}

/// A + diag(d). CSR output gains diagonal positions that were absent.
inline Matrix add_diagonal(const Matrix& a, std::span<const double> d) {
  if (static_cast<int>(d.size()) != a.n())
    throw std::invalid_argument("add_diagonal: dimension mismatch");
  if (a.is_dense()) {
    Matrix r = a;
    for (int i = 0; i < a.n(); ++i) r.dense_at(i, i) += d[static_cast<std::size_t>(i)];
    return r;
  }
  std::vector<Triplet> ts;
  ts.reserve(a.stored_entries() + static_cast<std::size_t>(a.n()));
  std::vector<char> has_diag(static_cast<std::size_t>(a.n()), 0);
  a.for_each_entry([&](int i, int j, double v) {
    if (i == j) {
      has_diag[static_cast<std::size_t>(i)] = 1;
      ts.push_back({i, j, v + d[static_cast<std::size_t>(i)]});
    } else {
      ts.push_back({i, j, v});
    }
  });
  for (int i = 0; i < a.n(); ++i)
    if (!has_diag[static_cast<std::size_t>(i)]) ts.push_back({i, i, d[static_cast<std::size_t>(i)]});
  return Matrix::from_triplets(a.n(), std::move(ts), Matrix::Storage::csr);
}

inline Matrix add_diagonal(const Matrix& a, const DiagonalMatrix& d) {
  return add_diagonal(a, std::span<const double>(d.diag()));
}

/// A + B over the union pattern. Dense result unless both operands are CSR.
inline Matrix add(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("add: dimension mismatch");
  if (a.is_dense() || b.is_dense()) {
    Matrix r = a.to_dense();
    b.for_each_entry([&](int i, int j, double v) { r.dense_at(i, j) += v; });
    return r;
  }
  std::vector<Triplet> ts;
  for (int i = 0; i < a.n(); ++i) {
    int ka = a.row_offsets()[i], ea = a.row_offsets()[i + 1];
    int kb = b.row_offsets()[i], eb = b.row_offsets()[i + 1];
    while (ka < ea || kb < eb) {
      int ja = ka < ea ? a.cols()[ka] : a.n();
      int jb = kb < eb ? b.cols()[kb] : b.n();
      if (ja < jb) {
        ts.push_back({i, ja, a.values()[ka++]});
      } else if (jb < ja) {
        ts.push_back({i, jb, b.values()[kb++]});
      } else {
        ts.push_back({i, ja, a.values()[ka++] + b.values()[kb++]});
      }
    }
  }
  return Matrix::from_triplets(a.n(), std::move(ts), Matrix::Storage::csr);
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
  return add(a, scale_entries(b, -1.0));
}

/// Dense product A * B.
inline Matrix dense_multiply(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("dense_multiply: dimension mismatch");
  const Matrix ad = a.to_dense();
  const Matrix bd = b.to_dense();
  const int n = a.n();
  Matrix r = Matrix::dense(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = ad.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) r.dense_at(i, j) += aik * bd.at(k, j);
    }
  }
  return r;
}

inline Vec diagonal_of(const Matrix& a) {
  Vec d(static_cast<std::size_t>(a.n()), 0.0);
  a.for_each_entry([&](int i, int j, double v) {
    if (i == j) d[static_cast<std::size_t>(i)] = v;
  });
  return d;
}

inline double max_abs_entry(const Matrix& a) {
  double m = 0.0;
  a.for_each_entry([&](int, int, double v) { m = std::max(m, std::abs(v)); });
  return m;
}

/// |a_ij - b_ij| <= tol for all positions (tol = 0 means exact equality).
inline bool entrywise_equal(const Matrix& a, const Matrix& b, double tol = 0.0) {
  if (a.n() != b.n()) return false;
  bool eq = true;
  a.for_each_entry([&](int i, int j, double v) {
    if (!(std::abs(v - b.at(i, j)) <= tol)) eq = false;
  });
  b.for_each_entry([&](int i, int j, double v) {
    if (!(std::abs(a.at(i, j) - v) <= tol)) eq = false;
  });
  return eq;
}

}  // namespace icpkit
