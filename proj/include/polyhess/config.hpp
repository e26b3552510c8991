#pragma once

// Run configuration.  Two accepted syntaxes with the same sections and keys:
//
//   [problem]   N, k, alpha (optional override), form = strong|weak
//   [domain]    extent = 1.0 | 1.0,2.0[,..]   nodes = 64 | 64,48[,..]
//   [datum]     kind = constant|gaussian|checker|file, amplitude, width, cells, path
//   [lambda]    value, schedule = 0,0.01,...
//   [solver]    grad_tol, max_iters, step_rule = backtracking|fixed, armijo_c, rho,
//               fixed_step, path_points, deform_tol, seed, fit_samples, jobs
//   [output]    directory, dump_fields = true|false
//
// INI text (";" starts a comment line) or a JSON object of section objects.
// Unknown sections or keys are rejected with ConfigError.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polyhess/energy.hpp"
#include "polyhess/solvers.hpp"

namespace polyhess {

struct DatumSpec {
  std::string kind = "constant";
  double amplitude = 1.0;
  double width = 0.15;  // gaussian standard deviation, in box units
  int cells = 4;        // checker cells per axis
  std::string path;     // field dump for kind = file
};

struct RunConfig {
  int N = 2;
  int k = 2;
  std::optional<int> alpha_override;
  Form form = Form::Strong;
  std::vector<double> extent{1.0};  // one value per axis, or a single value for all
  std::vector<int> nodes{64};
  DatumSpec datum;
  double lambda = 0.0;
  std::vector<double> lambda_schedule;
  SolverConfig solver;
  std::string out_dir = "out";
  bool dump_fields = true;

  bool operator==(const RunConfig&) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical INI text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

BoxDomain build_domain(const RunConfig& c);
ScalarField build_datum(const RunConfig& c, const BoxDomain& d, int ghost_width);
/// Setting at the configured lambda (or `lambda` when given).
EnergySetting build_setting(const RunConfig& c, std::optional<double> lambda = std::nullopt);

}  // namespace polyhess
