// polyhess command line: exponents, verify, solve, continuation.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 suite failure.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "polyhess/config.hpp"
#include "polyhess/errors.hpp"
#include "polyhess/field_io.hpp"
#include "polyhess/report.hpp"
#include "polyhess/solvers.hpp"
#include "polyhess/verify.hpp"

namespace fs = std::filesystem;
using namespace polyhess;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitSuite = 4;

struct Overrides {
  std::string config;
  std::optional<std::string> form;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.form) c.form = parse_form(*o.form);
  if (o.lambda) c.lambda = *o.lambda;
  if (o.seed) c.solver.seed = *o.seed;
  if (o.jobs) c.solver.jobs = *o.jobs;
  if (o.out) c.out_dir = *o.out;
  validate(c.solver);
  return c;
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json base_summary(const std::string& command, const RunConfig& c, const EnergySetting& s) {
  return json{{"command", command},
              {"config", to_json(c)},
              {"regime", to_json(regime_report(s.params))},
              {"alpha", alpha_provenance(s)},
              {"seed", c.solver.seed}};
}

json dump_pair(const RunConfig& c, const SolutionPair& p, const fs::path& dir) {
  json paths = json::array();
  if (!c.dump_fields) return paths;
  for (const auto& [name, field] : {std::pair<std::string, const ScalarField*>{"u_m", &p.u_m}, {"u_star", &p.u_star}}) {
    const FieldDumpPaths d = write_field(dir / name, *field);
    paths.push_back(d.data.string());
    paths.push_back(d.meta.string());
    if (c.N == 2) {
      write_field_csv(dir / (name + ".csv"), *field);
      paths.push_back((dir / (name + ".csv")).string());
    }
  }
  return paths;
}

int cmd_exponents(int n, int k) {
  const ProblemParams p{n, k};
  validate(p);
  std::cout << to_json(regime_report(p)).dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, int jobs) {
  VerifyOptions opt;
  opt.suites = suites;
  opt.seed = seed;
  opt.jobs = jobs;
  const auto results = run_verify(opt);
  std::cout << format_table(results);
  for (const auto& r : results)
    if (!r.passed) return kExitSuite;
  return 0;
}

int cmd_solve(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = resolve(o);
  const EnergySetting s = build_setting(c);
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);
  json summary = base_summary("solve", c, s);
  try {
    const TwoSolutionRun run = c.form == Form::Weak ? weak_two_solutions(s, c.solver) : two_solutions(s, c.solver);
    summary["status"] = "converged";
    summary["pair"] = to_json(run.pair, s.alpha);
    summary["energy_m"] = to_json(energy_report(run.pair.u_m, s));
    summary["energy_star"] = to_json(energy_report(run.pair.u_star, s));
    summary["minorant_fit"] = to_json(run.fit);
    summary["radii"] = to_json(run.radii);
    summary["witnesses"] = {{"phi_check", run.witnesses.phi_check},
                            {"phi_trivial", run.witnesses.phi_trivial},
                            {"psi_check", run.witnesses.psi_check},
                            {"psi_flipped", run.witnesses.psi_flipped},
                            {"mollifier_width", run.witnesses.mollifier_width}};
    summary["far_scale"] = run.far_scale;
    summary["records"] = {{"local_min", to_json(run.min_record)}, {"mountain_pass", to_json(run.mp_record)}};
    json artifacts = dump_pair(c, run.pair, dir);
    artifacts.push_back((dir / "run.json").string());
    summary["artifacts"] = artifacts;
    summary["wall_clock_seconds"] = seconds_since(t0);
    write_text(dir / "run.json", summary.dump(2) + "\n");
    std::cout << "J_m " << num(run.pair.J_m) << "  J_star " << num(run.pair.J_star) << "  sep " << num(run.pair.sep)
              << "\nsummary " << (dir / "run.json").string() << "\n";
    return 0;
  } catch (const NonConvergenceError& e) {
    summary["status"] = "nonconvergence";
    summary["error"] = e.what();
    summary["partial_record"] = to_json(e.record());
    summary["wall_clock_seconds"] = seconds_since(t0);
    write_text(dir / "run.json", summary.dump(2) + "\n");
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kExitSolver;
  } catch (const GeometryError& e) {
    summary["status"] = "geometry_failure";
    summary["error"] = e.what();
    summary["wall_clock_seconds"] = seconds_since(t0);
    write_text(dir / "run.json", summary.dump(2) + "\n");
    std::cerr << "mountain-pass geometry failed: " << e.what() << "\n";
    return kExitSolver;
  }
}

int cmd_continuation(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = resolve(o);
  if (c.lambda_schedule.empty()) throw ConfigError("continuation needs [lambda] schedule");
  const EnergySetting s = build_setting(c, 0.0);
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);
  ContinuationResult res;
  try {
    res = continuation_in_lambda(s, c.lambda_schedule, c.solver);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  std::string csv = "lambda,J_m,J_star,sep,converged\n";
  json rows = json::array();
  for (const auto& r : res.rows) {
    csv += num(r.lambda) + "," + num(r.J_m) + "," + num(r.J_star) + "," + num(r.sep) + "," +
           (r.converged ? "1" : "0") + "\n";
    rows.push_back(to_json(r));
  }
  write_text(dir / "continuation.csv", csv);

  json summary = base_summary("continuation", c, s);
  summary["rows"] = rows;
  summary["lambda0_lower_bound"] = res.lambda0_lower_bound ? json(*res.lambda0_lower_bound) : json(nullptr);
  json artifacts = json::array({(dir / "continuation.csv").string(), (dir / "run.json").string()});
  if (res.last_pair) {
    summary["last_pair"] = to_json(*res.last_pair, s.alpha);
    for (auto& p : dump_pair(c, *res.last_pair, dir)) artifacts.push_back(p);
  }
  summary["artifacts"] = artifacts;
  summary["status"] = res.lambda0_lower_bound ? "converged" : "nonconvergence";
  summary["wall_clock_seconds"] = seconds_since(t0);
  write_text(dir / "run.json", summary.dump(2) + "\n");
  std::cout << csv;
  return res.lambda0_lower_bound ? 0 : kExitSolver;
}

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "config file (INI or JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--form", o.form, "strong | weak")->check(CLI::IsMember({"strong", "weak"}));
  cmd->add_option("--lambda", o.lambda, "datum multiplier");
  cmd->add_option("--seed", o.seed, "seed for all sampling");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-solution solver for the polyharmonic k-Hessian Dirichlet problem"};
  app.require_subcommand(1);

  int n = 2, k = 2;
  auto* exponents = app.add_subcommand("exponents", "regime and exponent report as JSON");
  exponents->add_option("--n", n, "dimension N")->required();
  exponents->add_option("--k", k, "Hessian order k")->required();

  std::vector<std::string> suites;
  std::uint64_t verify_seed = 0;
  int verify_jobs = 1;
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--suite", suites, "algebra | exponents | grid | energy (repeatable; default all)");
  verify->add_option("--seed", verify_seed, "seed");
  verify->add_option("--jobs", verify_jobs, "worker threads")->check(CLI::PositiveNumber);

  Overrides solve_opts, cont_opts;
  auto* solve = app.add_subcommand("solve", "compute the local minimiser and the mountain-pass point");
  add_run_flags(solve, solve_opts);
  auto* continuation = app.add_subcommand("continuation", "sweep the lambda schedule with warm starts");
  add_run_flags(continuation, cont_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*exponents) return cmd_exponents(n, k);
    if (*verify) return cmd_verify(suites, verify_seed, verify_jobs);
    if (*solve) return cmd_solve(solve_opts);
    if (*continuation) return cmd_continuation(cont_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapabilityError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kExitSolver;
  } catch (const GeometryError& e) {
    std::cerr << "mountain-pass geometry failed: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
