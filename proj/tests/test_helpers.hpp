#pragma once

/// @file test_helpers.hpp
/// @brief Independent oracles and random fixture builders for the test suite.
///
/// Everything here is deliberately coded without the library's own linear
/// algebra paths, so every comparison pits two separate implementations
/// against each other: plain row-major Gaussian elimination instead of the
/// library LU, a norm-root limit instead of power iteration, and a loop-level
/// transcription of the modulus step instead of the engine.

#include "icpkit/icpkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace testkit {

using icpkit::Matrix;
using icpkit::Vec;

using Dense = std::vector<std::vector<double>>;

inline Dense dense_of(const Matrix& a) {
  Dense out(static_cast<std::size_t>(a.n()),
            std::vector<double>(static_cast<std::size_t>(a.n()), 0.0));
  a.for_each_entry([&](int i, int j, double v) {
    out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
  });
  return out;
}

inline Matrix matrix_of(const Dense& d) {
  const int n = static_cast<int>(d.size());
  Matrix a = Matrix::dense(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a.dense_at(i, j) = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return a;
}

/// Plain Gaussian elimination with partial pivoting on a row-major copy.
/// Throws std::runtime_error on a (numerically) singular matrix.
inline Vec gauss_solve(Dense a, Vec b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("gauss_solve: size mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14)
      throw std::runtime_error("gauss_solve: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Infinity norm of A^{-1} E computed by independent column solves.
inline double inverse_apply_inf_norm(const Dense& a, const Dense& e) {
  const std::size_t n = a.size();
  std::vector<Vec> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = e[i][j];
    cols[j] = gauss_solve(a, rhs);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(cols[j][i]);
    best = std::max(best, row);
  }
  return best;
}

/// Spectral radius of a nonnegative matrix by the norm-root limit
/// rho = lim ||A^m||^(1/m), evaluated at m = 2^40 via repeated squaring with
/// per-step normalization. Independent of the library's power iteration.
inline double rho_norm_root(const Dense& a0) {
  const std::size_t n = a0.size();
  Dense b = a0;
  double log_scale = 0.0;  // log ||A^(2^t)|| accumulated before b's own norm
  double estimate = 0.0;
  const int kSquarings = 40;
  for (int t = 0; t <= kSquarings; ++t) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += std::abs(b[i][j]);
      norm = std::max(norm, row);
    }
    if (norm == 0.0) return 0.0;
    const double power = std::pow(2.0, t);
    estimate = std::exp((std::log(norm) + log_scale) / power);
    if (t == kSquarings) break;
    Dense next(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = b[i][k] / norm;
        if (v == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) next[i][j] += v * (b[k][j] / norm);
      }
    log_scale = 2.0 * (log_scale + std::log(norm));
    b = std::move(next);
  }
  return estimate;
}

/// Loop-level reference for the phi1 = I, phi = 0 modulus iteration:
///   (M1 + phi2) z+ = N1 z + |(A - phi2) z + q + phi2 psi(z)| + phi2 psi(z) - q
/// with a fresh independent elimination every step.
inline std::vector<Vec> reference_modulus_iterates(const Dense& a, const Dense& m1,
                                                   const Dense& n1, const Vec& phi2,
                                                   const Dense& psi_c, const Vec& psi_d,
                                                   const Vec& q, Vec z, int steps) {
  const std::size_t n = a.size();
  Dense system = m1;
  for (std::size_t i = 0; i < n; ++i) system[i][i] += phi2[i];
  std::vector<Vec> iterates;
  iterates.push_back(z);
  for (int s = 0; s < steps; ++s) {
    Vec psi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = psi_d[i];
      for (std::size_t j = 0; j < n; ++j) v += psi_c[i][j] * z[j];
      psi[i] = v;
    }
    Vec rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double az = 0.0, nz = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        az += a[i][j] * z[j];
        nz += n1[i][j] * z[j];
      }
      const double inner = az - phi2[i] * z[i] + q[i] + phi2[i] * psi[i];
      rhs[i] = nz + std::abs(inner) + phi2[i] * psi[i] - q[i];
    }
    z = gauss_solve(system, rhs);
    iterates.push_back(z);
  }
  return iterates;
}

// ---------------------------------------------------------------------------
// Random fixture builders (std::mt19937_64 directly, independent of the
// library's DeterministicRng)
// ---------------------------------------------------------------------------

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline int uniform_int(std::mt19937_64& gen, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(gen);
}

inline Vec random_vec(std::mt19937_64& gen, int n, double lo, double hi) {
  Vec v(static_cast<std::size_t>(n));
  for (double& x : v) x = uniform(gen, lo, hi);
  return v;
}

/// Strictly diagonally dominant with positive diagonal and mixed signs off
/// the diagonal; every such matrix is H+.
inline Matrix random_sdd_matrix(std::mt19937_64& gen, int n) {
  Matrix a = Matrix::dense(n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = uniform(gen, -1.0, 1.0);
      a.dense_at(i, j) = v;
      off += std::abs(v);
    }
    a.dense_at(i, i) = off + uniform(gen, 0.2, 2.0);
  }
  return a;
}

/// Strictly diagonally dominant Z-matrix with positive diagonal: an M-matrix.
inline Matrix random_m_matrix(std::mt19937_64& gen, int n) {
  Matrix a = Matrix::dense(n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = -uniform(gen, 0.0, 1.0);
      a.dense_at(i, j) = v;
      off += std::abs(v);
    }
    a.dense_at(i, i) = off + uniform(gen, 0.2, 2.0);
  }
  return a;
}

/// Symmetric positive definite (hence P) via B^T B + shift I.
inline Matrix random_spd_matrix(std::mt19937_64& gen, int n) {
  Dense b(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& row : b)
    for (double& v : row) v = uniform(gen, -1.0, 1.0);
  Matrix a = Matrix::dense(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += b[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
             b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      a.dense_at(i, j) = s;
    }
  for (int i = 0; i < n; ++i) a.dense_at(i, i) += 0.5 * n;
  return a;
}

inline Matrix random_nonneg_matrix(std::mt19937_64& gen, int n, double scale) {
  Matrix a = Matrix::dense(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.dense_at(i, j) = uniform(gen, 0.0, scale);
  return a;
}

/// Random psi of the given kind; affine maps keep |C| entries <= 0.3 so the
/// induced Lipschitz bound stays small against diagonals >= 1.
inline icpkit::PsiMap random_psi(std::mt19937_64& gen, int n, icpkit::PsiMap::Kind kind) {
  using icpkit::PsiMap;
  switch (kind) {
    case PsiMap::Kind::zero: return PsiMap::zero(n);
    case PsiMap::Kind::constant: return PsiMap::constant(random_vec(gen, n, 0.0, 0.5));
    case PsiMap::Kind::affine: {
      Matrix c = Matrix::dense(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          c.dense_at(i, j) = uniform_int(gen, 0, 2) == 0 ? uniform(gen, -0.3, 0.3) : 0.0;
      return PsiMap::affine(std::move(c), random_vec(gen, n, 0.0, 0.5));
    }
  }
  throw std::logic_error("unreachable");
}

inline icpkit::PsiMap::Kind pick_psi_kind(std::mt19937_64& gen) {
  switch (uniform_int(gen, 0, 2)) {
    case 0: return icpkit::PsiMap::Kind::zero;
    case 1: return icpkit::PsiMap::Kind::constant;
    default: return icpkit::PsiMap::Kind::affine;
  }
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testkit
