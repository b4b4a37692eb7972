// Command-line front end: solve, verify, oracle, generate, bench.
//
// Exit codes: 0 success (solve converged / certificate holds / outputs
// written), 1 negative outcome (not converged / certificate fails / no
// oracle solution), 2 input or usage error.

#include "icpkit/icpkit.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace icpkit;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

struct ProblemOpts {
  std::string bundle;
  std::string matrix;
  std::string q;
  std::string psi = "zero";
  std::string psi_c;
  std::string psi_d;
  std::string g;
};

void add_problem_options(CLI::App* cmd, ProblemOpts& o) {
  cmd->add_option("--bundle", o.bundle, "Problem bundle directory (overrides file flags)");
  cmd->add_option("--matrix", o.matrix, "System matrix A, Matrix Market coordinate file");
  cmd->add_option("--q", o.q, "Vector q, one value per line");
  cmd->add_option("--psi", o.psi, "psi shape: zero|constant|affine")
      ->check(CLI::IsMember({"zero", "constant", "affine"}));
  cmd->add_option("--psi-c", o.psi_c, "Affine psi matrix C (Matrix Market)");
  cmd->add_option("--psi-d", o.psi_d, "psi offset vector d");
  cmd->add_option("--g", o.g, "Lipschitz bound G (Matrix Market; default |C|)");
}

IcpProblem load_problem(const ProblemOpts& o) {
  if (!o.bundle.empty()) return load_problem_bundle(o.bundle);
  if (o.matrix.empty() || o.q.empty())
    throw std::invalid_argument("either --bundle or both --matrix and --q are required");
  Matrix a = read_matrix_market(o.matrix);
  Vec q = read_vector(o.q);
  PsiMap psi = PsiMap::zero(a.n());
  if (o.psi == "constant") {
    if (o.psi_d.empty()) throw std::invalid_argument("--psi constant requires --psi-d");
    psi = PsiMap::constant(read_vector(o.psi_d));
  } else if (o.psi == "affine") {
    if (o.psi_c.empty()) throw std::invalid_argument("--psi affine requires --psi-c");
    Matrix c = read_matrix_market(o.psi_c);
    Vec d = o.psi_d.empty() ? zeros(c.n()) : read_vector(o.psi_d);
    psi = o.g.empty() ? PsiMap::affine(std::move(c), std::move(d))
                      : PsiMap::affine(std::move(c), std::move(d), read_matrix_market(o.g));
  }
  return IcpProblem(std::move(a), std::move(q), std::move(psi));
}

struct SchemeOpts {
  std::string method = "mnmod";
  double theta1 = 1.0;
  double theta2 = 1.0;
  std::string phi;
  std::string phi1;
  std::string phi2;
  std::string m1;
  std::string n1;
  bool strict = false;
};

void add_scheme_options(CLI::App* cmd, SchemeOpts& o) {
  cmd->add_option("--method", o.method,
                  "Splitting method: mnmod|mnmmod|mnmaor|mnmsor|mnmgs|mnmj|custom")
      ->check(CLI::IsMember({"mnmod", "mnmmod", "mnmaor", "mnmsor", "mnmgs", "mnmj", "custom"}));
  cmd->add_option("--theta1", o.theta1, "First relaxation parameter (mnmmod/mnmaor/mnmsor)");
  cmd->add_option("--theta2", o.theta2, "Second relaxation parameter (mnmaor)");
  cmd->add_option("--phi", o.phi, "Shift diagonal phi: scalar:<v>|file:<path>");
  cmd->add_option("--phi1", o.phi1, "Scaling diagonal phi1: scalar:<v>|file:<path>");
  cmd->add_option("--phi2", o.phi2, "Modulus diagonal phi2: scalar:<v>|file:<path>");
  cmd->add_option("--m1", o.m1, "Custom splitting part M1 (Matrix Market)");
  cmd->add_option("--n1", o.n1, "Custom splitting part N1 (Matrix Market)");
  cmd->add_flag("--strict", o.strict, "Reject diagonals a preset method would override");
}

DiagonalMatrix parse_diagonal(const std::string& spec, int n, const std::string& what) {
  if (spec.rfind("scalar:", 0) == 0) {
    const std::string v = spec.substr(7);
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(what + ": malformed scalar value");
    return DiagonalMatrix::uniform(n, x);
  }
  if (spec.rfind("file:", 0) == 0) {
    Vec d = read_vector(spec.substr(5));
    if (static_cast<int>(d.size()) != n)
      throw std::invalid_argument(what + ": diagonal file has wrong length");
    return DiagonalMatrix(std::move(d));
  }
  throw std::invalid_argument(what + ": expected scalar:<v> or file:<path>");
}

SplittingScheme build_scheme(const SchemeOpts& o, int n) {
  SplittingScheme s;
  if (o.method == "mnmod") {
    s = SplittingScheme::mnmod();
  } else if (o.method == "mnmmod") {
    s = SplittingScheme::mnmmod(o.theta1);
  } else if (o.method == "mnmaor") {
    s = SplittingScheme::mnmaor(o.theta1, o.theta2);
  } else if (o.method == "mnmsor") {
    s = SplittingScheme::mnmsor(o.theta1);
  } else if (o.method == "mnmgs") {
    s = SplittingScheme::mnmgs();
  } else if (o.method == "mnmj") {
    s = SplittingScheme::mnmj();
  } else if (o.method == "custom") {
    if (o.m1.empty() || o.n1.empty())
      throw std::invalid_argument("--method custom requires --m1 and --n1");
    s = SplittingScheme::custom(read_matrix_market(o.m1), read_matrix_market(o.n1));
  } else {
    throw std::invalid_argument("unknown method " + o.method);
  }
  if (!o.phi.empty()) s.with_phi(parse_diagonal(o.phi, n, "--phi"));
  if (!o.phi1.empty()) s.with_phi1(parse_diagonal(o.phi1, n, "--phi1"));
  if (!o.phi2.empty()) s.with_phi2(parse_diagonal(o.phi2, n, "--phi2"));
  s.with_strict(o.strict);
  return s;
}

ManifestEntries cli_provenance(const ProblemOpts& p, const SchemeOpts* s) {
  ManifestEntries m;
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) m.emplace_back(k, v);
  };
  put("cli.bundle", p.bundle);
  put("cli.matrix", p.matrix);
  put("cli.q", p.q);
  put("cli.psi_c", p.psi_c);
  put("cli.psi_d", p.psi_d);
  put("cli.g", p.g);
  if (s) {
    put("cli.phi", s->phi);
    put("cli.phi1", s->phi1);
    put("cli.phi2", s->phi2);
    put("cli.m1", s->m1);
    put("cli.n1", s->n1);
  }
  return m;
}

struct SolverOpts {
  double tol = 1e-8;
  int max_iter = 5000;
  std::string z0 = "zero";
};

void add_solver_options(CLI::App* cmd, SolverOpts& o) {
  cmd->add_option("--tol", o.tol, "Stopping tolerance on Res (default 1e-8)");
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap (default 5000)");
  cmd->add_option("--z0", o.z0, "Start point: zero|file:<path>");
}

SolverConfig make_config(const SolverOpts& o, int n) {
  SolverConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  if (o.z0 == "zero") {
    cfg.z0.clear();
  } else if (o.z0.rfind("file:", 0) == 0) {
    cfg.z0 = read_vector(o.z0.substr(5));
    if (static_cast<int>(cfg.z0.size()) != n)
      throw std::invalid_argument("--z0 file has wrong length");
  } else {
    throw std::invalid_argument("--z0: expected zero or file:<path>");
  }
  return cfg;
}

void print_report_summary(const SolveReport& rep) {
  std::cout << "converged = " << (rep.converged ? "true" : "false") << "\n"
            << "iterations = " << rep.iterations << "\n"
            << "stop_reason = " << stop_reason_name(rep.stop_reason) << "\n"
            << "diverged = " << (rep.diverged ? "true" : "false") << "\n";
  if (!rep.residual_history.empty())
    std::cout << "final_res = " << format_full(rep.residual_history.back()) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_solve(const ProblemOpts& po, const SchemeOpts& so, const SolverOpts& vo,
              const std::string& out) {
  const IcpProblem prob = load_problem(po);
  const SplittingScheme scheme = build_scheme(so, prob.n());
  const SolverConfig cfg = make_config(vo, prob.n());
  if (!out.empty()) {
    const ExperimentResult res =
        run_experiment(prob, scheme, cfg, out, cli_provenance(po, &so));
    print_report_summary(res.report);
    std::cout << "csv = " << out << "\n"
              << "manifest = " << out << ".manifest\n";
    return res.report.converged ? 0 : 1;
  }
  const SolveReport rep = solve(build(scheme, prob.A()), prob, cfg);
  print_report_summary(rep);
  std::cout << "z_final =";
  for (double v : rep.z_final) std::cout << " " << format_full(v);
  std::cout << "\n";
  return rep.converged ? 0 : 1;
}

int run_verify(const ProblemOpts& po, const SchemeOpts& so, const std::string& which) {
  const IcpProblem prob = load_problem(po);
  const SplittingScheme scheme = build_scheme(so, prob.n());
  const BuiltSplitting built = build(scheme, prob.A());
  std::vector<Certificate> certs;
  auto want = [&](const std::string& name) { return which == "all" || which == name; };
  if (want("p_spectral")) certs.push_back(check_p_spectral(built, prob));
  if (want("h_splitting")) certs.push_back(check_h_splitting(built, prob));
  if (want("aor_gate"))
    certs.push_back(check_aor_gate(prob.A(), built.phi1, built.phi2,
                                   prob.psi().lipschitz_G(), scheme.theta1, scheme.theta2));
  if (want("sdd_scaling_case1")) certs.push_back(check_sdd_scaling(built, prob, 1));
  if (want("sdd_scaling_case2")) certs.push_back(check_sdd_scaling(built, prob, 2));
  if (certs.empty()) throw std::invalid_argument("unknown certificate " + which);
  bool any_holds = false;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    if (i) std::cout << "\n";
    std::cout << certificate_report(certs[i]);
    any_holds = any_holds || certs[i].holds;
  }
  return any_holds ? 0 : 1;
}

int run_oracle(const ProblemOpts& po, const std::string& out) {
  const IcpProblem prob = load_problem(po);
  const std::vector<Vec> sols = oracle_solve(prob);
  std::cout << "solutions = " << sols.size() << "\n";
  for (std::size_t k = 0; k < sols.size(); ++k) {
    std::cout << "z" << k << " =";
    for (double v : sols[k]) std::cout << " " << format_full(v);
    std::cout << "\n";
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    for (std::size_t k = 0; k < sols.size(); ++k)
      write_vector(std::filesystem::path(out) / ("solution_" + std::to_string(k) + ".txt"),
                   sols[k]);
  }
  return sols.empty() ? 1 : 0;
}

struct GenerateOpts {
  std::string family = "tridiag";
  int n = 8;
  int grid = 4;
  double a = -1.0, b = 4.0, c = -1.0;
  std::uint64_t seed = 1;
  double density = 0.1;
  std::string q_mode = "random";
  std::uint64_t q_seed = 1;
  std::string q_file;
  std::string z_star_file;
  std::string psi = "zero";
  std::optional<double> psi_value;
  std::string psi_c;
  std::string psi_d;
  std::string g;
  std::string out;
};

int run_generate(const GenerateOpts& o) {
  GeneratorSpec spec;
  if (o.family == "tridiag") {
    spec.family = GeneratorSpec::Family::tridiag;
    spec.n = o.n;
    spec.sub = o.a;
    spec.diag = o.b;
    spec.super = o.c;
  } else if (o.family == "laplacian2d") {
    spec.family = GeneratorSpec::Family::laplacian2d;
    spec.grid = o.grid;
  } else if (o.family == "random-hplus") {
    spec.family = GeneratorSpec::Family::random_hplus;
    spec.n = o.n;
    spec.seed = o.seed;
    spec.density = o.density;
  } else {
    throw std::invalid_argument("unknown family " + o.family);
  }
  if (o.psi == "zero") {
    spec.psi.kind = PsiMap::Kind::zero;
  } else if (o.psi == "constant") {
    spec.psi.kind = PsiMap::Kind::constant;
    spec.psi.constant_value = o.psi_value;
    spec.psi.d_path = o.psi_d;
  } else {
    spec.psi.kind = PsiMap::Kind::affine;
    spec.psi.c_path = o.psi_c;
    spec.psi.d_path = o.psi_d;
    spec.psi.g_path = o.g;
  }
  if (o.q_mode == "random") {
    spec.q_mode = GeneratorSpec::QMode::random;
    spec.q_seed = o.q_seed;
  } else if (o.q_mode == "file") {
    spec.q_mode = GeneratorSpec::QMode::file;
    spec.q_path = o.q_file;
  } else if (o.q_mode == "from-solution") {
    spec.q_mode = GeneratorSpec::QMode::from_solution;
    if (o.z_star_file.empty())
      throw std::invalid_argument("--q-mode from-solution requires --z-star");
    spec.z_star = read_vector(o.z_star_file);
  } else {
    throw std::invalid_argument("unknown q mode " + o.q_mode);
  }
  if (o.out.empty()) throw std::invalid_argument("generate requires --out <dir>");
  const IcpProblem prob = generate(spec);
  ManifestEntries extra;
  extra.emplace_back("generator.family", o.family);
  if (spec.family == GeneratorSpec::Family::random_hplus) {
    extra.emplace_back("generator.seed", std::to_string(o.seed));
    extra.emplace_back("generator.density", format_full(o.density));
  }
  extra.emplace_back("generator.q_mode", o.q_mode);
  if (o.q_mode == "random")
    extra.emplace_back("generator.q_seed", std::to_string(o.q_seed));
  if (o.q_mode == "from-solution")
    extra.emplace_back("generator.inactive_p_value", "1");
  save_problem_bundle(o.out, prob, extra);
  std::cout << "bundle = " << o.out << "\n"
            << "n = " << prob.n() << "\n";
  return 0;
}

struct BenchEntry {
  std::string tag;
  SplittingScheme scheme;
};

std::vector<BenchEntry> parse_bench_methods(const std::string& methods, int n,
                                            const SchemeOpts& base) {
  std::vector<BenchEntry> out;
  std::string rest = methods;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    std::string item = rest.substr(0, comma);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    if (item.empty()) continue;
    SchemeOpts so = base;
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = item.find(':', start);
      parts.push_back(item.substr(start, colon - start));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    so.method = parts[0];
    if (parts.size() > 1) so.theta1 = std::stod(parts[1]);
    if (parts.size() > 2) so.theta2 = std::stod(parts[2]);
    std::string tag = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) tag += "_" + parts[i];
    for (char& ch : tag)
      if (ch == '.') ch = 'p';
    out.push_back({tag, build_scheme(so, n)});
  }
  if (out.empty()) throw std::invalid_argument("--methods list is empty");
  return out;
}

int run_bench(const ProblemOpts& po, const SchemeOpts& so, const SolverOpts& vo,
              const std::string& methods, const std::string& out_dir) {
  const IcpProblem prob = load_problem(po);
  const SolverConfig cfg = make_config(vo, prob.n());
  const std::vector<BenchEntry> entries = parse_bench_methods(methods, prob.n(), so);
  if (out_dir.empty()) throw std::invalid_argument("bench requires --out-dir <dir>");
  std::filesystem::create_directories(out_dir);
  std::string summary = "method,converged,iterations,final_res\n";
  bool all_converged = true;
  for (const BenchEntry& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(
        prob, e.scheme, cfg, std::filesystem::path(out_dir) / (e.tag + ".csv"),
        cli_provenance(po, nullptr));
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const SolveReport& rep = res.report;
    all_converged = all_converged && rep.converged;
    summary += e.tag + "," + (rep.converged ? "true" : "false") + "," +
               std::to_string(rep.iterations) + "," +
               format_full(rep.residual_history.back()) + "\n";
    std::cout << e.tag << ": converged=" << (rep.converged ? "true" : "false")
              << " iterations=" << rep.iterations
              << " final_res=" << format_full(rep.residual_history.back())
              << " wall_ms=" << ms << "\n";
  }
  atomic_write_file(std::filesystem::path(out_dir) / "summary.csv", summary);
  return all_converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulus matrix-splitting toolkit for implicit complementarity problems"};
  app.require_subcommand(1);

  ProblemOpts po_solve, po_verify, po_oracle, po_bench;
  SchemeOpts so_solve, so_verify, so_bench;
  SolverOpts vo_solve, vo_bench;
  std::string solve_out, verify_which = "all", oracle_out, bench_methods = "mnmgs,mnmj",
              bench_out;
  GenerateOpts gen;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Run the modulus iteration");
  add_problem_options(solve_cmd, po_solve);
  add_scheme_options(solve_cmd, so_solve);
  add_solver_options(solve_cmd, vo_solve);
  solve_cmd->add_option("--out", solve_out, "CSV trace path (manifest lands at <out>.manifest)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Evaluate convergence certificates");
  add_problem_options(verify_cmd, po_verify);
  add_scheme_options(verify_cmd, so_verify);
  verify_cmd
      ->add_option("--certificate", verify_which,
                   "p_spectral|h_splitting|aor_gate|sdd_scaling_case1|sdd_scaling_case2|all")
      ->check(CLI::IsMember({"p_spectral", "h_splitting", "aor_gate", "sdd_scaling_case1",
                             "sdd_scaling_case2", "all"}));

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Enumerate all solutions of a small problem");
  add_problem_options(oracle_cmd, po_oracle);
  oracle_cmd->add_option("--out", oracle_out, "Directory for solution vectors");

  CLI::App* gen_cmd = app.add_subcommand("generate", "Write a reproducible problem bundle");
  gen_cmd->add_option("--family", gen.family, "tridiag|laplacian2d|random-hplus")
      ->check(CLI::IsMember({"tridiag", "laplacian2d", "random-hplus"}));
  gen_cmd->add_option("--n", gen.n, "Dimension (tridiag, random-hplus)");
  gen_cmd->add_option("--grid", gen.grid, "Grid side m for laplacian2d (n = m*m)");
  gen_cmd->add_option("--a", gen.a, "Tridiag subdiagonal value");
  gen_cmd->add_option("--b", gen.b, "Tridiag diagonal value");
  gen_cmd->add_option("--c", gen.c, "Tridiag superdiagonal value");
  gen_cmd->add_option("--seed", gen.seed, "Matrix seed (random-hplus)");
  gen_cmd->add_option("--density", gen.density, "Off-diagonal density (random-hplus)");
  gen_cmd->add_option("--q-mode", gen.q_mode, "random|file|from-solution")
      ->check(CLI::IsMember({"random", "file", "from-solution"}));
  gen_cmd->add_option("--q-seed", gen.q_seed, "Seed for random q");
  gen_cmd->add_option("--q-file", gen.q_file, "q vector file (q-mode file)");
  gen_cmd->add_option("--z-star", gen.z_star_file, "Target solution (q-mode from-solution)");
  gen_cmd->add_option("--psi", gen.psi, "zero|constant|affine")
      ->check(CLI::IsMember({"zero", "constant", "affine"}));
  gen_cmd->add_option("--psi-value", gen.psi_value, "Uniform constant psi value");
  gen_cmd->add_option("--psi-c", gen.psi_c, "Affine psi matrix C");
  gen_cmd->add_option("--psi-d", gen.psi_d, "psi offset vector d");
  gen_cmd->add_option("--g", gen.g, "Lipschitz bound G");
  gen_cmd->add_option("--out", gen.out, "Bundle output directory");

  CLI::App* bench_cmd = app.add_subcommand("bench", "Compare methods on one problem");
  add_problem_options(bench_cmd, po_bench);
  add_scheme_options(bench_cmd, so_bench);
  add_solver_options(bench_cmd, vo_bench);
  bench_cmd->add_option("--methods", bench_methods,
                        "Comma list, each method[:theta1[:theta2]] (e.g. "
                        "mnmgs,mnmsor:1.2,mnmaor:1.1:0.9)");
  bench_cmd->add_option("--out-dir", bench_out, "Directory for per-method CSV traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(solve_cmd)) return run_solve(po_solve, so_solve, vo_solve, solve_out);
    if (app.got_subcommand(verify_cmd)) return run_verify(po_verify, so_verify, verify_which);
    if (app.got_subcommand(oracle_cmd)) return run_oracle(po_oracle, oracle_out);
    if (app.got_subcommand(gen_cmd)) return run_generate(gen);
    if (app.got_subcommand(bench_cmd))
      return run_bench(po_bench, so_bench, vo_bench, bench_methods, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
