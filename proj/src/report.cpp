#include "polyhess/report.hpp"

namespace polyhess {

namespace {

json optional_rational(const std::optional<Rational>& r) { return r ? json(to_string(*r)) : json(nullptr); }

}  // namespace

json to_json(const RegimeReport& r) {
  return json{
      {"N", r.params.N},
      {"k", r.params.k},
      {"regime", to_string(r.regime)},
      {"alpha_main", r.alpha_main},
      {"alpha_weak", r.alpha_weak},
      {"alpha_summable", r.alpha_summable},
      {"p_star", to_string(r.exponents.p_star)},
      {"q_star", optional_rational(r.exponents.q_star)},
      {"p_tilde", to_string(r.exponents.p_tilde)},
      {"q_tilde", to_string(r.exponents.q_tilde)},
      {"datum_space", r.datum_space_label},
  };
}

json to_json(const EnergyReport& r) {
  return json{{"J", r.J},
              {"quadratic_term", r.quadratic_term},
              {"datum_term", r.datum_term},
              {"nonlinear_term", r.nonlinear_term},
              {"seminorm", r.seminorm},
              {"form", to_string(r.form)}};
}

json to_json(const MinorantFit& f) {
  return json{{"C1", f.coefficients.C1},
              {"C2", f.coefficients.C2},
              {"k", f.coefficients.k},
              {"samples", f.samples},
              {"best_ratio", f.best_ratio},
              {"safety_factor", kMinorantSafety},
              {"verification_margin", f.verification_margin},
              {"verification_samples", f.verification_samples}};
}

json to_json(const MinorantRadii& r) {
  return json{{"R0", r.R0}, {"R1", r.R1}, {"RM", r.RM}, {"R2", r.R2}, {"peak", r.peak}};
}

json to_json(const PSRecord& r) {
  const PSRecord d = r.downsampled(kRecordRows);
  return json{{"iterations", r.size()}, {"J", d.J}, {"residual", d.residual}, {"seminorm", d.seminorm}};
}

json to_json(const SolutionPair& p, int alpha) {
  return json{{"J_m", p.J_m},
              {"J_star", p.J_star},
              {"sep", p.sep},
              {"residual_m", p.residual_m},
              {"residual_star", p.residual_star},
              {"seminorm_m", seminorm(p.u_m, alpha)},
              {"seminorm_star", seminorm(p.u_star, alpha)}};
}

json to_json(const SolverConfig& c) {
  return json{{"grad_tol", c.grad_tol},
              {"max_iters", c.max_iters},
              {"step_rule", c.step_rule.kind == StepKind::Fixed ? "fixed" : "backtracking"},
              {"armijo_c", c.step_rule.c},
              {"rho", c.step_rule.rho},
              {"fixed_step", c.step_rule.fixed},
              {"path_points", c.path_points},
              {"deform_tol", c.deform_tol},
              {"seed", c.seed},
              {"fit_samples", c.fit_samples},
              {"jobs", c.jobs}};
}

json to_json(const RunConfig& c) {
  return json{
      {"problem",
       {{"N", c.N}, {"k", c.k}, {"alpha", c.alpha_override ? json(*c.alpha_override) : json(nullptr)},
        {"form", to_string(c.form)}}},
      {"domain", {{"extent", c.extent}, {"nodes", c.nodes}}},
      {"datum",
       {{"kind", c.datum.kind},
        {"amplitude", c.datum.amplitude},
        {"width", c.datum.width},
        {"cells", c.datum.cells},
        {"path", c.datum.path}}},
      {"lambda", {{"value", c.lambda}, {"schedule", c.lambda_schedule}}},
      {"solver", to_json(c.solver)},
      {"output", {{"directory", c.out_dir}, {"dump_fields", c.dump_fields}}},
  };
}

json to_json(const ContinuationRow& r) {
  return json{{"lambda", r.lambda}, {"J_m", r.J_m},           {"J_star", r.J_star},
              {"sep", r.sep},       {"converged", r.converged}, {"error", r.error}};
}

json alpha_provenance(const EnergySetting& s) {
  const RegimeReport r = regime_report(s.params);
  std::string source = "override";
  if (!s.alpha_overridden) {
    source = s.form == Form::Strong ? "main" : "weak";
  } else if (s.alpha == r.alpha_summable) {
    source = "override (matches summable-data alpha)";
  }
  return json{{"alpha", s.alpha}, {"source", source}};
}

}  // namespace polyhess
