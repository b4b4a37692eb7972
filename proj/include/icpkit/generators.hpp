#pragma once

/// @file generators.hpp
/// @brief Reproducible problem generators and the on-disk problem bundle.
///
/// Randomness flows through one fixed generator (mt19937_64) with an explicit
/// bit-to-double mapping, so a spec plus a seed always reproduces the same
/// problem, on any platform.

#include "icpkit/io.hpp"
#include "icpkit/linalg.hpp"
#include "icpkit/matrix.hpp"
#include "icpkit/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace icpkit {

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : g_(seed) {}

  /// Uniform in [0, 1), from the top 53 bits of the generator word.
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const int span = hi - lo + 1;
    int v = lo + static_cast<int>(uniform() * span);
    return std::min(v, hi);
  }

  std::uint64_t raw() { return g_(); }

 private:
  std::mt19937_64 g_;
};

// ---------------------------------------------------------------------------
// Matrix families
// ---------------------------------------------------------------------------

/// Tridiagonal (sub, diag, super) in CSR storage.
inline Matrix tridiag(int n, double sub, double diag, double super) {
  if (n <= 0) throw std::invalid_argument("tridiag: n must be positive");
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(3 * n));
  for (int i = 0; i < n; ++i) {
    if (i > 0) ts.push_back({i, i - 1, sub});
    ts.push_back({i, i, diag});
    if (i < n - 1) ts.push_back({i, i + 1, super});
  }
  return Matrix::from_triplets(n, std::move(ts));
}

/// Five-point Laplacian on an m-by-m grid (n = m^2), CSR storage: diagonal 4,
/// -1 to each horizontal and vertical neighbor.
inline Matrix laplacian2d(int m) {
  if (m <= 0) throw std::invalid_argument("laplacian2d: m must be positive");
  const int n = m * m;
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(5 * n));
  for (int r = 0; r < m; ++r) {
    for (int col = 0; col < m; ++col) {
      const int i = r * m + col;
      if (r > 0) ts.push_back({i, i - m, -1.0});
      if (col > 0) ts.push_back({i, i - 1, -1.0});
      ts.push_back({i, i, 4.0});
      if (col < m - 1) ts.push_back({i, i + 1, -1.0});
      if (r < m - 1) ts.push_back({i, i + m, -1.0});
    }
  }
  return Matrix::from_triplets(n, std::move(ts));
}

/// Random H-matrix with positive diagonal, CSR storage: draw a strictly
/// diagonally dominant pattern (off-diagonal fill ~ density), then flip
/// random off-diagonal signs, which preserves the comparison matrix. The
/// construction guarantees the class; the check-and-retry loop guards the
/// guarantee rather than carrying it.
inline Matrix random_hplus(int n, std::uint64_t seed, double density) {
  if (n <= 0) throw std::invalid_argument("random_hplus: n must be positive");
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("random_hplus: density must lie in [0, 1]");
  DeterministicRng rng(seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<Triplet> ts;
    for (int i = 0; i < n; ++i) {
      double row_sum = 0.0;
      std::vector<Triplet> row;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (rng.uniform() < density) {
          double v = rng.uniform(0.2, 1.0);
          row_sum += v;
          if (rng.uniform() < 0.5) v = -v;
          row.push_back({i, j, v});
        }
      }
      ts.push_back({i, i, row_sum + rng.uniform(0.1, 1.0)});
      for (Triplet& t : row) ts.push_back(t);
    }
    Matrix a = Matrix::from_triplets(n, std::move(ts));
    if (is_h_plus_matrix(a)) return a;
  }
  throw std::runtime_error("random_hplus: failed to draw an H-matrix with positive diagonal");
}

// ---------------------------------------------------------------------------
// GeneratorSpec
// ---------------------------------------------------------------------------

struct PsiSpec {
  PsiMap::Kind kind = PsiMap::Kind::zero;
  std::optional<double> constant_value;  // constant: uniform offset
  std::string d_path;                    // constant/affine offset file
  std::string c_path;                    // affine map file
  std::string g_path;                    // affine Lipschitz bound file (default |C|)
};

struct GeneratorSpec {
  enum class Family { tridiag, laplacian2d, random_hplus, file };
  enum class QMode { random, file, from_solution };

  Family family = Family::tridiag;
  int n = 0;        // tridiag / random_hplus dimension
  int grid = 0;     // laplacian2d side (n = grid^2)
  double sub = -1.0, diag = 4.0, super = -1.0;
  std::uint64_t seed = 0;
  double density = 0.1;
  std::string path;  // family file: bundle directory

  QMode q_mode = QMode::random;
  std::uint64_t q_seed = 0;
  std::string q_path;
  Vec z_star;  // from_solution target

  PsiSpec psi;
};

namespace detail {

inline PsiMap materialize_psi(const PsiSpec& spec, int n) {
  switch (spec.kind) {
    case PsiMap::Kind::zero:
      return PsiMap::zero(n);
    case PsiMap::Kind::constant: {
      if (spec.constant_value) return PsiMap::constant(Vec(static_cast<std::size_t>(n), *spec.constant_value));
      if (spec.d_path.empty())
        throw std::invalid_argument("constant psi needs a value or an offset file");
      return PsiMap::constant(read_vector(spec.d_path));
    }
    case PsiMap::Kind::affine: {
      if (spec.c_path.empty()) throw std::invalid_argument("affine psi needs a C matrix file");
      Matrix c = read_matrix_market(spec.c_path);
      Vec d = spec.d_path.empty() ? zeros(c.n()) : read_vector(spec.d_path);
      if (!spec.g_path.empty())
        return PsiMap::affine(std::move(c), std::move(d), read_matrix_market(spec.g_path));
      return PsiMap::affine(std::move(c), std::move(d));
    }
  }
  throw std::invalid_argument("unknown psi kind");
}

}  // namespace detail

/// q for a prescribed solution z*: with r = z* - psi(z*) (required >= 0),
/// set p_i = 0 where r_i > 0 and p_i = 1 where r_i = 0, then q = p - A z*.
/// The value 1 on the r-active set is the generator's deterministic choice.
inline Vec q_from_solution(const Matrix& a, const PsiMap& psi, std::span<const double> z_star) {
  if (static_cast<int>(z_star.size()) != a.n())
    throw std::invalid_argument("q_from_solution: z_star dimension mismatch");
  const Vec y = psi.eval(z_star);
  const Vec az = a.matvec(z_star);
  Vec q(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    const double r = z_star[u] - y[u];
    if (!(r >= 0.0))
      throw std::invalid_argument("q_from_solution: z_star has z - psi(z) < 0");
    const double p = (r > 0.0) ? 0.0 : 1.0;
    q[u] = p - az[u];
  }
  return q;
}

// ---------------------------------------------------------------------------
// Problem bundles on disk
// ---------------------------------------------------------------------------

inline constexpr const char* kBundleManifestName = "problem.manifest";

/// Write A.mtx, q.txt, the psi parts, and the bundle manifest into dir.
inline void save_problem_bundle(const std::filesystem::path& dir, const IcpProblem& prob,
                                const ManifestEntries& extra = {}) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "A.mtx", prob.A());
  write_vector(dir / "q.txt", prob.q());
  ManifestEntries m;
  m.emplace_back("kind", "icp_problem");
  m.emplace_back("n", std::to_string(prob.n()));
  m.emplace_back("psi", prob.psi().kind_name());
  m.emplace_back("a_file", "A.mtx");
  m.emplace_back("q_file", "q.txt");
  switch (prob.psi().kind()) {
    case PsiMap::Kind::zero:
      break;
    case PsiMap::Kind::constant:
      write_vector(dir / "d.txt", prob.psi().d());
      m.emplace_back("d_file", "d.txt");
      break;
    case PsiMap::Kind::affine:
      write_matrix_market(dir / "C.mtx", prob.psi().C());
      write_vector(dir / "d.txt", prob.psi().d());
      write_matrix_market(dir / "G.mtx", prob.psi().lipschitz_G());
      m.emplace_back("c_file", "C.mtx");
      m.emplace_back("d_file", "d.txt");
      m.emplace_back("g_file", "G.mtx");
      break;
  }
  for (const auto& e : extra) m.push_back(e);
  write_manifest(dir / kBundleManifestName, m);
}

inline IcpProblem load_problem_bundle(const std::filesystem::path& dir) {
  const auto m = parse_manifest(dir / kBundleManifestName);
  auto want = [&](const std::string& key) -> std::string {
    const auto it = m.find(key);
    if (it == m.end())
      throw std::runtime_error(dir.string() + ": bundle manifest is missing '" + key + "'");
    return it->second;
  };
  Matrix a = read_matrix_market(dir / want("a_file"));
  Vec q = read_vector(dir / want("q_file"));
  const std::string psi_kind = want("psi");
  PsiMap psi = PsiMap::zero(a.n());
  if (psi_kind == "zero") {
    // keep the zero map
  } else if (psi_kind == "constant") {
    psi = PsiMap::constant(read_vector(dir / want("d_file")));
  } else if (psi_kind == "affine") {
    Matrix c = read_matrix_market(dir / want("c_file"));
    Vec d = read_vector(dir / want("d_file"));
    if (m.count("g_file"))
      psi = PsiMap::affine(std::move(c), std::move(d), read_matrix_market(dir / m.at("g_file")));
    else
      psi = PsiMap::affine(std::move(c), std::move(d));
  } else {
    throw std::runtime_error(dir.string() + ": unknown psi kind '" + psi_kind + "'");
  }
  return IcpProblem(std::move(a), std::move(q), std::move(psi));
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

inline IcpProblem generate(const GeneratorSpec& spec) {
  if (spec.family == GeneratorSpec::Family::file) {
    if (spec.path.empty()) throw std::invalid_argument("generate: bundle path required");
    return load_problem_bundle(spec.path);
  }
  Matrix a = [&] {
    switch (spec.family) {
      case GeneratorSpec::Family::tridiag:
        return tridiag(spec.n, spec.sub, spec.diag, spec.super);
      case GeneratorSpec::Family::laplacian2d:
        return laplacian2d(spec.grid);
      case GeneratorSpec::Family::random_hplus:
        return random_hplus(spec.n, spec.seed, spec.density);
      case GeneratorSpec::Family::file:
        break;
    }
    throw std::invalid_argument("generate: unknown family");
  }();
  PsiMap psi = detail::materialize_psi(spec.psi, a.n());
  Vec q;
  switch (spec.q_mode) {
    case GeneratorSpec::QMode::random: {
      DeterministicRng rng(spec.q_seed);
      q.resize(static_cast<std::size_t>(a.n()));
      for (double& v : q) v = rng.uniform(-1.0, 1.0);
      break;
    }
    case GeneratorSpec::QMode::file:
      if (spec.q_path.empty()) throw std::invalid_argument("generate: q file path required");
      q = read_vector(spec.q_path);
      break;
    case GeneratorSpec::QMode::from_solution:
      q = q_from_solution(a, psi, spec.z_star);
      break;
  }
  return IcpProblem(std::move(a), std::move(q), std::move(psi));
}

}  // namespace icpkit
