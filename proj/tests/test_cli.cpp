#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "polyhess/config.hpp"
#include "polyhess/errors.hpp"

namespace fs = std::filesystem;
using namespace polyhess;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("polyhess_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + POLYHESS_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

// Small enough that a full solve takes about a second.
std::string small_config(const fs::path& out, int max_iters = 2000) {
  return "[problem]\nN = 2\nk = 2\n[domain]\nnodes = 16\n[datum]\nkind = constant\n"
         "[lambda]\nvalue = 0.05\nschedule = 0, 0.05\n[solver]\nmax_iters = " +
         std::to_string(max_iters) + "\n[output]\ndirectory = " + out.string() + "\n";
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.N = 3;
  c.k = 3;
  c.alpha_override = 4;
  c.form = Form::Weak;
  c.extent = {1.0, 0.75, 2.0};
  c.nodes = {24, 18, 48};
  c.datum.kind = "gaussian";
  c.datum.width = 0.1;
  c.lambda = 0.125;
  c.lambda_schedule = {0.0, 0.1, 0.3};
  c.solver.grad_tol = 3e-7;
  c.solver.seed = 99;
  c.solver.step_rule.kind = StepKind::Fixed;
  c.solver.step_rule.fixed = 0.25;
  c.out_dir = "somewhere/else";
  c.dump_fields = false;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("JSON and INI configs agree") {
  const RunConfig ini = parse_config(
      "; comment line\n# another\n[problem]\nN = 2\nk = 2\n[domain]\nnodes = 32\n"
      "[lambda]\nschedule = 0, 0.01\n[solver]\nseed = 5\n");
  const RunConfig js = parse_config(
      R"({"problem": {"N": 2, "k": 2}, "domain": {"nodes": 32},
          "lambda": {"schedule": [0, 0.01]}, "solver": {"seed": 5}})");
  CHECK(ini == js);
  CHECK(ini.nodes == std::vector<int>{32});
  CHECK(ini.lambda_schedule == std::vector<double>{0.0, 0.01});
  CHECK(ini.solver.seed == 5u);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[problem]\nN = 2\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"grad_tol": 1e-6, "typo": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("[datum]\nkind = swirl\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[datum]\nkind = file\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nN = 2\nk = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\npath_points = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nnodes = 16, 16, 16\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\ngrad_tol = abc\n"), ConfigError);
  RunConfig big;
  big.N = 4;
  big.k = 2;
  CHECK_THROWS_AS(build_domain(big), CapabilityError);
}

TEST_CASE("bundled config parses") {
  const RunConfig c = load_config(POLYHESS_CONFIGS "/ma2d.cfg");
  CHECK(c.N == 2);
  CHECK(c.k == 2);
  CHECK(c.nodes == std::vector<int>{64});
  CHECK(c.lambda_schedule.front() == 0.0);
  CHECK(c.lambda == 0.05);
}

TEST_CASE("exponents subcommand") {
  const fs::path dir = scratch("exponents");
  const Run r = cli("exponents --n 5 --k 2", dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["regime"] == "SUB");
  CHECK(j["alpha_main"] == 3);
  CHECK(j["p_star"] == "15/14");
  CHECK(j["q_star"] == "15/1");
  CHECK(json::parse(cli("exponents --n 3 --k 2", dir).out)["q_star"].is_null());

  CHECK(cli("exponents --n 3 --k 4", dir).code == 2);
  CHECK(cli("exponents --n 3", dir).code == 2);
  CHECK(cli("nonsense", dir).code == 2);
}

TEST_CASE("verify subcommand is seeded and filterable") {
  const fs::path dir = scratch("verify");
  const Run a = cli("verify --suite algebra --seed 7", dir);
  const Run b = cli("verify --suite algebra --seed 7 --jobs 3", dir);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("algebra") != std::string::npos);
  CHECK(a.out.find("exponents") == std::string::npos);
  CHECK(cli("verify --suite algebra --seed 8", dir).out != a.out);
  CHECK(cli("verify --suite nope", dir).code == 2);
}

TEST_CASE("solve writes a summary and field dumps") {
  const fs::path dir = scratch("solve");
  const fs::path cfg = write(dir / "run.cfg", small_config(dir / "out"));
  const Run r = cli("solve --config \"" + cfg.string() + "\"", dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "out" / "run.json"));
  CHECK(j["status"] == "converged");
  CHECK(j["pair"]["J_m"].get<double>() < 0.0);
  CHECK(j["pair"]["J_star"].get<double>() > 0.0);
  CHECK(j["alpha"]["source"] == "main");
  CHECK(j["records"]["mountain_pass"]["J"].size() <= 1000u);
  for (const auto& p : j["artifacts"]) CHECK(fs::exists(p.get<std::string>()));
  CHECK(fs::exists(dir / "out" / "u_star.csv"));

  // Overrides beat the file.
  const Run w = cli("solve --config \"" + cfg.string() + "\" --form weak --out \"" + (dir / "weak").string() + "\"", dir);
  REQUIRE(w.code == 0);
  CHECK(json::parse(slurp(dir / "weak" / "run.json"))["alpha"]["source"] == "weak");
}

TEST_CASE("solver failure exits with code 3 and keeps the partial record") {
  const fs::path dir = scratch("nonconv");
  const fs::path cfg = write(dir / "run.cfg", small_config(dir / "out", 1));
  const Run r = cli("solve --config \"" + cfg.string() + "\"", dir);
  CHECK(r.code == 3);
  const json j = json::parse(slurp(dir / "out" / "run.json"));
  CHECK(j["status"] == "nonconvergence");
  CHECK(j.contains("partial_record"));
}

TEST_CASE("bad configs exit with code 2") {
  const fs::path dir = scratch("badcfg");
  const fs::path cfg = write(dir / "bad.cfg", "[solver]\nunknown_key = 1\n");
  CHECK(cli("solve --config \"" + cfg.string() + "\"", dir).code == 2);
  CHECK(cli("solve --config \"" + (dir / "missing.cfg").string() + "\"", dir).code == 2);
  const fs::path nosched = write(dir / "nosched.cfg", "[domain]\nnodes = 16\n");
  CHECK(cli("continuation --config \"" + nosched.string() + "\"", dir).code == 2);
}

TEST_CASE("continuation table is reproducible") {
  const fs::path dir = scratch("continuation");
  const fs::path cfg = write(dir / "run.cfg", small_config(dir / "a"));
  REQUIRE(cli("continuation --config \"" + cfg.string() + "\"", dir).code == 0);
  REQUIRE(cli("continuation --config \"" + cfg.string() + "\" --out \"" + (dir / "b").string() + "\"", dir).code == 0);
  const std::string a = slurp(dir / "a" / "continuation.csv");
  CHECK(a == slurp(dir / "b" / "continuation.csv"));
  CHECK(a.rfind("lambda,J_m,J_star,sep,converged\n", 0) == 0);
  CHECK(slurp(dir / "a" / "u_star.f64") == slurp(dir / "b" / "u_star.f64"));
  const json j = json::parse(slurp(dir / "a" / "run.json"));
  CHECK(j["lambda0_lower_bound"] == 0.05);
  CHECK(j["rows"].size() == 2u);
}
