#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "lpwg/analysis.hpp"
#include "lpwg/prox.hpp"
#include "lpwg/study_io.hpp"
#include "lpwg/verify.hpp"
#include "lpwg/version.hpp"

namespace lpwg::cli {

namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

std::vector<int> parse_n_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int n = 0;
    try {
      n = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("--n: '" + item + "' is not an integer");
    }
    if (pos != item.size() || n < 1) throw std::invalid_argument("--n: '" + item + "' is not a positive integer");
    out.push_back(n);
  }
  if (out.empty()) throw std::invalid_argument("--n: empty list");
  return out;
}

void RunConfig::validate() const {
  const ProblemCase pc = builtin_case(problem);
  if (p != 1 && p != 2) throw std::invalid_argument("--p must be 1 or 2");
  space.validate();
  solver.validate();
  if (solver.prox == prox::Method::ExactK1 && p == 1) {
    throw std::invalid_argument("--prox exact needs blocks of size 2 (k = 1), but k >= 2; use wl1 or oracle");
  }
  if (n_list.empty()) throw std::invalid_argument("--n: empty list");
  for (int n : n_list) pc.check_n(n);
  if (format != "csv" && format != "md") throw std::invalid_argument("--format must be csv or md");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::string ns;
  for (std::size_t i = 0; i < n_list.size(); ++i) ns += (i ? ";" : "") + std::to_string(n_list[i]);
  return {{"problem", problem},
          {"p", std::to_string(p)},
          {"k", std::to_string(space.k)},
          {"l", std::to_string(space.l)},
          {"n", ns},
          {"alpha", num(solver.alpha)},
          {"beta", num(solver.beta)},
          {"tol", num(solver.tol)},
          {"residual_tol", num(solver.residual_tol)},
          {"max_iters", std::to_string(solver.max_iters)},
          {"prox", prox::to_string(solver.prox)}};
}

namespace {

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ProblemCase pc = builtin_case(cfg.problem);
  StudyOutput result;
  result.config = cfg.echo();
  result.version = kVersion;
  result.omit_wall_time = cfg.omit_wall_time;
  result.table = run_study(pc, cfg.p, cfg.space, cfg.n_list, cfg.solver, [&](const ErrorReport& r) {
    err << "n=" << r.n << " e_L=" << format_sci(r.e_L) << " e_W1=" << format_sci(r.e_W1)
        << " e_W2=" << format_sci(r.e_W2) << " iters=" << r.iterations << (r.converged ? "" : " (not converged)")
        << '\n';
  });

  std::ostringstream buf;
  if (cfg.format == "md") {
    write_markdown(buf, result);
  } else {
    write_csv(buf, result);
  }
  if (cfg.out.empty()) {
    out << buf.str();
    out.flush();
    if (!out) return kIoError;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot open '" << cfg.out << "' for writing\n";
      return kIoError;
    }
    f << buf.str();
    f.close();
    if (!f) {
      err << "error: failed writing '" << cfg.out << "'\n";
      return kIoError;
    }
  }
  if (!result.table.converged()) {
    err << "error: fixed-point iteration did not converge within " << cfg.solver.max_iters << " iterations\n";
    return kNotConverged;
  }
  return kOk;
}

int run_verify(std::ostream& out) {
  bool all = true;
  for (const CheckResult& c : run_verify_suite()) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? kOk : kFailure;
}

int run_prox_table(double alpha, std::ostream& out) {
  out << "# lpwg_version=" << kVersion << "\n# alpha=" << num(alpha) << '\n';
  out << "v1,v2,prox1,prox2,proj1,proj2\n";
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      const Eigen::Vector2d v(0.25 * i, 0.25 * j);
      const Eigen::VectorXd p = prox::prox_phi_k1(v, alpha);
      const Vec2 q = prox::project_omega0(v, 1.0 / alpha);
      out << format_sci(v(0)) << ',' << format_sci(v(1)) << ',' << format_sci(p(0)) << ',' << format_sci(p(1)) << ','
          << format_sci(q(0)) << ',' << format_sci(q(1)) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"L^p primal-dual weak Galerkin solver for non-divergence form elliptic problems", "lpwg"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string n_arg = "4,8,16";
  std::string prox_arg = "wl1";
  int l_arg = -1;
  auto* solve = app.add_subcommand("solve", "run a convergence study and write the error table");
  solve->add_option("--problem", cfg.problem, "test problem")->check(CLI::IsMember({"const", "var", "disc"}));
  solve->add_option("--p", cfg.p, "stabilizer exponent")->check(CLI::IsMember({1, 2}));
  solve->add_option("--k", cfg.space.k, "polynomial degree of v0 and v_b");
  solve->add_option("--l", l_arg, "multiplier degree (default k-1)");
  solve->add_option("--n", n_arg, "comma-separated mesh subdivisions");
  solve->add_option("--alpha", cfg.solver.alpha, "fixed-point parameter alpha");
  solve->add_option("--beta", cfg.solver.beta, "fixed-point parameter beta");
  solve->add_option("--tol", cfg.solver.tol, "relative step tolerance");
  solve->add_option("--residual-tol", cfg.solver.residual_tol, "fixed-point residual tolerance");
  solve->add_option("--max-iters", cfg.solver.max_iters, "iteration cap");
  solve->add_option("--prox", prox_arg, "prox of phi for p = 1")->check(CLI::IsMember({"exact", "wl1", "oracle"}));
  solve->add_option("--out", cfg.out, "output file (default stdout)");
  solve->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "md"}));
  solve->add_flag("--no-wall-time", cfg.omit_wall_time, "leave the wall_time column empty");

  auto* verify = app.add_subcommand("verify", "run the invariant checks and print PASS/FAIL lines");
  double table_alpha = 1.0;
  auto* table = app.add_subcommand("prox-table", "print prox values of k = 1 blocks on a grid");
  table->add_option("--alpha", table_alpha, "prox parameter alpha")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (solve->parsed()) {
      cfg.space.l = l_arg >= 0 ? l_arg : cfg.space.k - 1;
      cfg.n_list = parse_n_list(n_arg);
      cfg.solver.prox = prox::parse_method(prox_arg);
      cfg.validate();
    }
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n" << solve->help();
    return kUsage;
  }

  try {
    if (solve->parsed()) return run_solve(cfg, out, err);
    if (verify->parsed()) return run_verify(out);
    if (table->parsed()) return run_prox_table(table_alpha, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace lpwg::cli
