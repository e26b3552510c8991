#pragma once

// Two critical points of the discrete energy: a local minimiser near the origin
// and a mountain-pass point at a positive level.
//
// All descent directions are Sobolev gradients A^{-1} g with A = (-1)^alpha Lap^alpha;
// residual norms are discrete L2 norms of the L2 gradient g.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyhess/energy.hpp"
#include "polyhess/riesz.hpp"

namespace polyhess {

enum class StepKind { Fixed, Backtracking };

struct StepRule {
  StepKind kind = StepKind::Backtracking;
  double c = 1e-4;       // Armijo constant
  double rho = 0.5;      // backtracking factor
  double fixed = 1.0;    // step length for StepKind::Fixed
};

struct SolverConfig {
  double grad_tol = 1e-6;
  int max_iters = 2000;
  StepRule step_rule;
  int path_points = 16;
  double deform_tol = 1e-4;  // relative change of the path maximum over 10 sweeps that ends deformation
  std::uint64_t seed = 0;
  int fit_samples = 30;
  int jobs = 1;
};

void validate(const SolverConfig& c);

struct PSRecord {
  std::vector<double> J;
  std::vector<double> residual;
  std::vector<double> seminorm;

  void push(double j, double r, double s);
  std::size_t size() const { return J.size(); }
  /// At most `max_rows` evenly spaced rows, always keeping the last one.
  PSRecord downsampled(std::size_t max_rows) const;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, PSRecord record)
      : std::runtime_error(what), record_(std::move(record)) {}
  const PSRecord& record() const { return record_; }

 private:
  PSRecord record_;
};

struct SolutionPair {
  ScalarField u_m;
  ScalarField u_star;
  double J_m = 0.0;
  double J_star = 0.0;
  double sep = 0.0;
  double residual_m = 0.0;
  double residual_star = 0.0;
};

struct LocalMinResult {
  ScalarField u;
  PSRecord record;
  double residual = 0.0;
  int iterations = 0;
};

/// Sobolev-gradient descent on evaluate_H.  Throws NonConvergenceError or GeometryError.
LocalMinResult minimize_local(const EnergySetting& s, const ScalarField& u0, const SolverConfig& cfg,
                              const CutoffSpec& c, const PolyharmonicSolver& riesz);
LocalMinResult minimize_local(const EnergySetting& s, const ScalarField& u0, const SolverConfig& cfg,
                              const CutoffSpec& c);

struct MountainPassResult {
  ScalarField u_star;
  PSRecord record;
  double residual = 0.0;
  int deform_iterations = 0;
  int ray_iterations = 0;
  int refine_iterations = 0;
};

/// Path deformation from u_m to v_far, a ridge-following stage on the ray through the path
/// maximum, then Newton refinement.
/// `via`, when given, is inserted as an interior node of the initial path.
MountainPassResult mountain_pass(const EnergySetting& s, const ScalarField& u_m, const ScalarField& v_far,
                                 const SolverConfig& cfg, const PolyharmonicSolver& riesz,
                                 const ScalarField* via = nullptr);
MountainPassResult mountain_pass(const EnergySetting& s, const ScalarField& u_m, const ScalarField& v_far,
                                 const SolverConfig& cfg);

struct TwoSolutionRun {
  SolutionPair pair;
  MinorantFit fit;
  MinorantRadii radii;
  CutoffSpec cutoff;
  GeometryWitnesses witnesses;
  double far_scale = 0.0;  // v_far = far_scale * psi
  PSRecord min_record;
  PSRecord mp_record;
};

/// Full orchestration; `warm` seeds the minimiser and the initial path.
TwoSolutionRun two_solutions(const EnergySetting& s, const SolverConfig& cfg, const SolutionPair* warm = nullptr);
/// Same pipeline on the divergence-form energy; requires form = Weak and alpha = alpha_weak.
TwoSolutionRun weak_two_solutions(const EnergySetting& s, const SolverConfig& cfg,
                                  const SolutionPair* warm = nullptr);

struct ProbeTrial {
  bool converged = false;
  std::string error;
  double start_seminorm = 0.0;
  double residual = 0.0;
  ScalarField u;
};

struct ProbeReport {
  std::vector<ProbeTrial> trials;
  double R0 = 0.0;
  double max_distance = 0.0;  // pairwise seminorm distance among converged minimisers
  bool success = false;
  std::vector<int> failures;
};

ProbeReport ball_uniqueness_probe(const EnergySetting& s, const SolverConfig& cfg, int trials);

struct ContinuationRow {
  double lambda = 0.0;
  double J_m = 0.0;
  double J_star = 0.0;
  double sep = 0.0;
  bool converged = false;
  std::string error;
};

struct ContinuationResult {
  std::vector<ContinuationRow> rows;
  std::optional<double> lambda0_lower_bound;  // largest converged lambda
  std::optional<SolutionPair> last_pair;       // pair at lambda0_lower_bound
};

/// Rows run in order, each warm-started from the last converged pair.
ContinuationResult continuation_in_lambda(const EnergySetting& s, const std::vector<double>& lambdas,
                                          const SolverConfig& cfg);

}  // namespace polyhess
