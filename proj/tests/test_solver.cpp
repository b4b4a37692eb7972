/// @file test_solver.cpp
/// @brief Iteration engine: golden fixture, determinism, stop conditions,
/// divergence guard, and the error-contraction diagnostic.

#include <catch2/catch_amalgamated.hpp>

#include "icpkit/oracle.hpp"
#include "icpkit/solver.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>

using namespace icpkit;
using Catch::Matchers::WithinAbs;

namespace {

IcpProblem golden_problem() { return IcpProblem::lcp(Matrix::dense(1, {2.0}), Vec{-1.0}); }

BuiltSplitting golden_built() {
  return build(SplittingScheme::mnmod(), Matrix::dense(1, {2.0}));
}

}  // namespace

TEST_CASE("Golden 1x1 fixture iterates exactly", "[solver]") {
  const IcpProblem prob = golden_problem();
  const BuiltSplitting b = golden_built();

  const Vec z1 = iterate_once(b, prob, Vec{0.0});
  CHECK_THAT(z1[0], WithinAbs(2.0 / 3.0, 1e-15));
  const Vec z2 = iterate_once(b, prob, z1);
  CHECK_THAT(z2[0], WithinAbs(4.0 / 9.0, 1e-15));
  const Vec z3 = iterate_once(b, prob, z2);
  CHECK_THAT(z3[0], WithinAbs(14.0 / 27.0, 1e-15));

  SECTION("the solution is a fixed point") {
    const Vec fp = iterate_once(b, prob, Vec{0.5});
    CHECK(fp[0] == 0.5);
  }

  SECTION("solve reaches the solution") {
    const SolveReport rep = solve(b, prob, SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.stop_reason == StopReason::tolerance_met);
    CHECK(rep.iterations <= 25);
    CHECK_THAT(rep.z_final[0], WithinAbs(0.5, 1e-8));
    REQUIRE(rep.residual_history.size() ==
            static_cast<std::size_t>(rep.iterations) + 1);
    for (std::size_t k = 1; k < rep.residual_history.size(); ++k)
      CHECK(rep.residual_history[k] < rep.residual_history[k - 1]);
    CHECK(rep.residual_history.back() < 1e-8);
  }
}

TEST_CASE("Stopping semantics", "[solver]") {
  const IcpProblem prob = golden_problem();
  const BuiltSplitting b = golden_built();

  SECTION("starting at the solution costs zero steps") {
    SolverConfig cfg;
    cfg.z0 = Vec{0.5};
    const SolveReport rep = solve(b, prob, cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(rep.residual_history == Vec{0.0});
    CHECK(rep.z_final == Vec{0.5});
  }
  SECTION("max_iter = 0 stops immediately without converging") {
    SolverConfig cfg;
    cfg.max_iter = 0;
    const SolveReport rep = solve(b, prob, cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.stop_reason == StopReason::max_iter);
    CHECK(rep.iterations == 0);
    CHECK(rep.residual_history.size() == 1);
  }
  SECTION("record_history = false leaves the history empty") {
    SolverConfig cfg;
    cfg.record_history = false;
    const SolveReport rep = solve(b, prob, cfg);
    CHECK(rep.converged);
    CHECK(rep.residual_history.empty());
  }
  SECTION("converged always means residual below tol") {
    std::mt19937_64 gen(501);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = testkit::uniform_int(gen, 1, 8);
      const Matrix a = testkit::random_m_matrix(gen, n);
      const PsiMap psi = trial % 2 == 0 ? PsiMap::zero(n)
                                        : testkit::random_psi(gen, n, PsiMap::Kind::constant);
      const IcpProblem p(a, testkit::random_vec(gen, n, -2.0, 2.0), psi);
      SplittingScheme s = SplittingScheme::mnmgs();
      s.with_phi2(DiagonalMatrix(diagonal_of(a)));
      const SolveReport rep = solve(build(s, a), p, SolverConfig{});
      REQUIRE(rep.converged);
      CHECK(residual(p, rep.z_final) < SolverConfig{}.tol);
    }
  }
}

TEST_CASE("Config validation", "[solver]") {
  const IcpProblem prob = golden_problem();
  const BuiltSplitting b = golden_built();

  SolverConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(solve(b, prob, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.max_iter = -1;
  CHECK_THROWS_AS(solve(b, prob, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.z0 = Vec{-0.1};
  CHECK_THROWS_AS(solve(b, prob, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.z0 = Vec{0.0, 0.0};
  CHECK_THROWS_AS(solve(b, prob, cfg), std::invalid_argument);
}

TEST_CASE("Runs are bitwise deterministic", "[solver]") {
  std::mt19937_64 gen(502);
  const int n = 6;
  const Matrix a = testkit::random_m_matrix(gen, n);
  const IcpProblem prob(a, testkit::random_vec(gen, n, -2.0, 2.0),
                        testkit::random_psi(gen, n, PsiMap::Kind::constant));
  SplittingScheme s = SplittingScheme::mnmgs();
  s.with_phi2(DiagonalMatrix(diagonal_of(a)));
  const BuiltSplitting b = build(s, a);

  const SolveReport r1 = solve(b, prob, SolverConfig{});
  const SolveReport r2 = solve(b, prob, SolverConfig{});
  REQUIRE(r1.converged);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.z_final == r2.z_final);
  CHECK(r1.residual_history == r2.residual_history);
}

TEST_CASE("Singular system matrix reports linear_solve_failure", "[solver]") {
  // M1 + phi2 = diag(0, 2) is exactly singular.
  const Matrix a = Matrix::identity(2);
  const Matrix m1 = Matrix::dense(2, {-1.0, 0.0, 0.0, 1.0});
  const Matrix n1 = subtract(m1, a);
  SplittingScheme s = SplittingScheme::custom(m1, n1);
  const BuiltSplitting b = build(s, a);
  const IcpProblem prob = IcpProblem::lcp(a, Vec{-1.0, -1.0});

  const SolveReport rep = solve(b, prob, SolverConfig{});
  CHECK_FALSE(rep.converged);
  CHECK(rep.stop_reason == StopReason::linear_solve_failure);
  CHECK(rep.iterations == 0);
  REQUIRE(rep.residual_history.size() == 1);
  CHECK(rep.residual_history[0] == residual(prob, zeros(2)));

  CHECK_THROWS_AS(iterate_once(b, prob, zeros(2)), singular_system_error);
}

TEST_CASE("Divergence guard trips on an expanding custom splitting", "[solver]") {
  // With M1 = [-4], N1 = [-5] on A = [1] and phi2 = 1 the inner term stays
  // at q = 1 > 0, so each step is z+ = (5/3) z: geometric blow-up.
  const Matrix a = Matrix::dense(1, {1.0});
  const Matrix m1 = Matrix::dense(1, {-4.0});
  const Matrix n1 = Matrix::dense(1, {-5.0});
  const BuiltSplitting b = build(SplittingScheme::custom(m1, n1), a);
  const IcpProblem prob = IcpProblem::lcp(a, Vec{1.0});

  SolverConfig cfg;
  cfg.max_iter = 200;
  cfg.z0 = Vec{1.0};
  const SolveReport rep = solve(b, prob, cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.diverged);
  CHECK(rep.stop_reason == StopReason::max_iter);
  CHECK(rep.iterations < 100);  // guard fires near (5/3)^k > 1e12, k ~ 55
  CHECK(rep.residual_history.back() > 1e12 * rep.residual_history.front());

  SECTION("each step multiplies the iterate by 5/3") {
    const Vec z1 = iterate_once(b, prob, Vec{1.0});
    CHECK_THAT(z1[0], WithinAbs(5.0 / 3.0, 1e-15));
  }
}

TEST_CASE("error_contraction_trace bounds every step", "[solver]") {
  const IcpProblem prob = golden_problem();
  const BuiltSplitting b = golden_built();

  SECTION("golden fixture obeys the 1/3 bound") {
    const std::vector<ErrorBoundPair> trace =
        error_contraction_trace(b, prob, SolverConfig{}, Vec{0.5});
    REQUIRE_FALSE(trace.empty());
    for (const ErrorBoundPair& pair : trace) {
      REQUIRE(pair.error.size() == 1);
      CHECK(pair.error[0] <= pair.bound[0] + 1e-12);
    }
  }
  SECTION("starting at the solution yields an empty trace") {
    SolverConfig cfg;
    cfg.z0 = Vec{0.5};
    CHECK(error_contraction_trace(b, prob, cfg, Vec{0.5}).empty());
  }
  SECTION("a non-solution reference is rejected") {
    CHECK_THROWS_AS(error_contraction_trace(b, prob, SolverConfig{}, Vec{0.9}),
                    std::invalid_argument);
  }
}

TEST_CASE("Reduced iteration matches the independent reference", "[solver]") {
  std::mt19937_64 gen(503);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = testkit::uniform_int(gen, 1, 8);
    const Matrix a = testkit::random_sdd_matrix(gen, n);
    const PsiMap psi = testkit::random_psi(gen, n, testkit::pick_psi_kind(gen));
    const IcpProblem prob(a, testkit::random_vec(gen, n, -2.0, 2.0), psi);
    const double theta1 = testkit::uniform(gen, 0.8, 1.5);
    const double theta2 = testkit::uniform(gen, 0.2, theta1);
    SplittingScheme s = SplittingScheme::mnmaor(theta1, theta2);
    const Vec phi2 = testkit::random_vec(gen, n, 0.5, 3.0);
    s.with_phi2(DiagonalMatrix(phi2));
    const BuiltSplitting b = build(s, a);

    // test-side transcription of psi as (C, d)
    testkit::Dense psi_c(static_cast<std::size_t>(n),
                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
    Vec psi_d = zeros(n);
    if (psi.kind() == PsiMap::Kind::constant) psi_d = psi.d();
    if (psi.kind() == PsiMap::Kind::affine) {
      psi_c = testkit::dense_of(psi.C());
      psi_d = psi.d();
    }

    const Vec z0 = testkit::random_vec(gen, n, 0.0, 2.0);
    const std::vector<Vec> ref = testkit::reference_modulus_iterates(
        testkit::dense_of(a), testkit::dense_of(b.M1), testkit::dense_of(b.N1), phi2,
        psi_c, psi_d, prob.q(), z0, 20);

    ModulusEngine engine(b);
    Vec z = z0;
    for (int k = 1; k <= 20; ++k) {
      z = engine.step(prob, z);
      REQUIRE(testkit::max_abs_diff(z, ref[static_cast<std::size_t>(k)]) <= 1e-12);
    }
  }
}
