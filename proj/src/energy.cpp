#include "polyhess/energy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "polyhess/errors.hpp"

namespace polyhess {

namespace {

double parity(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

// Coefficient of integrate(u * S_k[u]) in the strong energy.
double strong_coefficient(int k) { return -parity(k) / (k + 1); }
// Coefficient of integrate(sum_ij u_i u_j S^ij) in the weak energy.
double weak_coefficient(int k) { return parity(k) / ((k + 1.0) * k); }

void require_compatible(const ScalarField& u, const EnergySetting& s) {
  if (!(u.domain() == s.f.domain())) throw ContractError("field and datum live on different grids");
}

double quadratic_energy(const ScalarField& u, int alpha) { return 0.5 * half_order(u, alpha).norm_squared(); }

ScalarField quadratic_gradient(const ScalarField& u, int alpha) {
  ScalarField g = polyharmonic(u, alpha);
  if (alpha % 2 != 0) g *= -1.0;
  return g;
}

double nl_strong(const ScalarField& u, int k) { return strong_coefficient(k) * inner(u, sk_field(u, k)); }

ScalarField nl_strong_gradient(const ScalarField& u, int k) {
  const BoxDomain& d = u.domain();
  MatrixField h = hessian(u);
  ScalarField sk(d, u.ghost_width());
  for (std::size_t f = 0; f < d.size(); ++f) {
    sk[f] = sk_of_matrix(h.values[f], k);
    h.values[f] = sk_partials(h.values[f], k) * u[f];
  }
  ScalarField g = hessian_transpose(h);
  g += sk;
  g *= strong_coefficient(k);
  g.set_ghost_width(u.ghost_width());
  return g;
}

double nl_weak(const ScalarField& u, int k) {
  const BoxDomain& d = u.domain();
  const auto grad = gradient(u);
  const MatrixField h = hessian(u);
  double sum = 0.0;
  for (std::size_t f = 0; f < d.size(); ++f) {
    const SymmetricMatrix s = sk_partials(h.values[f], k);
    for (int i = 0; i < d.dim; ++i)
      for (int j = 0; j < d.dim; ++j) sum += grad[i][f] * grad[j][f] * s(i, j);
  }
  return weak_coefficient(k) * sum * d.cell_volume();
}

ScalarField nl_weak_gradient(const ScalarField& u, int k) {
  const BoxDomain& d = u.domain();
  const auto grad = gradient(u);
  MatrixField h = hessian(u);
  std::vector<ScalarField> v(d.dim, ScalarField(d, u.ghost_width()));
  for (std::size_t f = 0; f < d.size(); ++f) {
    const SymmetricMatrix s = sk_partials(h.values[f], k);
    SymmetricMatrix outer(d.dim);
    for (int i = 0; i < d.dim; ++i) {
      double si = 0.0;
      for (int j = 0; j < d.dim; ++j) si += s(i, j) * grad[j][f];
      v[i][f] = 2.0 * si;
      for (int j = i; j < d.dim; ++j) outer.set(i, j, grad[i][f] * grad[j][f]);
    }
    h.values[f] = sk_partials_derivative(h.values[f], outer, k);
  }
  ScalarField g = gradient_transpose(v);
  g += hessian_transpose(h);
  g *= weak_coefficient(k);
  g.set_ghost_width(u.ghost_width());
  return g;
}

}  // namespace

std::string to_string(Form f) { return f == Form::Strong ? "strong" : "weak"; }

Form parse_form(const std::string& s) {
  if (s == "strong") return Form::Strong;
  if (s == "weak") return Form::Weak;
  throw ConfigError("form must be 'strong' or 'weak', got '" + s + "'");
}

EnergySetting make_setting(const ProblemParams& params, double lambda, ScalarField f, Form form,
                           std::optional<int> alpha_override) {
  EnergySetting s;
  s.params = params;
  s.lambda = lambda;
  s.form = form;
  s.f = std::move(f);
  if (alpha_override) {
    s.alpha = *alpha_override;
    s.alpha_overridden = true;
  } else {
    s.alpha = form == Form::Strong ? alpha_main(params) : alpha_weak(params);
  }
  validate(s);
  return s;
}

void validate(const EnergySetting& s) {
  validate(s.params);
  if (s.params.N > 3) {
    throw CapabilityError("grids are limited to N <= 3 (requested N = " + std::to_string(s.params.N) + ")");
  }
  if (s.alpha < 2) throw DomainError("alpha must be >= 2");
  if (!s.alpha_overridden) {
    const int expected = s.form == Form::Strong ? alpha_main(s.params) : alpha_weak(s.params);
    if (s.alpha != expected) {
      throw DomainError("alpha = " + std::to_string(s.alpha) + " does not match the regime value " +
                        std::to_string(expected) + " and is not flagged as an override");
    }
  }
  validate(s.f.domain());
  if (s.f.domain().dim != s.params.N) throw DomainError("grid dimension differs from N");
  if (!std::isfinite(s.lambda)) throw DomainError("lambda must be finite");
}

EnergyReport energy_report(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  EnergyReport r;
  r.form = s.form;
  const double q2 = half_order(u, s.alpha).norm_squared();
  r.quadratic_term = 0.5 * q2;
  r.seminorm = std::sqrt(q2);
  r.datum_term = -s.lambda * inner(s.f, u);
  r.nonlinear_term = nonlinear_energy(u, s);
  r.J = r.quadratic_term + r.datum_term + r.nonlinear_term;
  return r;
}

double evaluate_J(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  return quadratic_energy(u, s.alpha) - s.lambda * inner(s.f, u) + nl_strong(u, s.params.k);
}

double evaluate_J_weak(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  return quadratic_energy(u, s.alpha) - s.lambda * inner(s.f, u) + nl_weak(u, s.params.k);
}

double evaluate_energy(const ScalarField& u, const EnergySetting& s) {
  return s.form == Form::Strong ? evaluate_J(u, s) : evaluate_J_weak(u, s);
}

double nonlinear_energy(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  return s.form == Form::Strong ? nl_strong(u, s.params.k) : nl_weak(u, s.params.k);
}

ScalarField nonlinear_gradient(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  return s.form == Form::Strong ? nl_strong_gradient(u, s.params.k) : nl_weak_gradient(u, s.params.k);
}

ScalarField residual_strong(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  ScalarField r = quadratic_gradient(u, s.alpha);
  r.axpy(-s.lambda, s.f);
  r += nl_strong_gradient(u, s.params.k);
  return r;
}

ScalarField residual_collocated(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  ScalarField r = quadratic_gradient(u, s.alpha);
  r.axpy(-parity(s.params.k), sk_field(u, s.params.k));
  r.axpy(-s.lambda, s.f);
  return r;
}

ScalarField residual_weak(const ScalarField& u, const EnergySetting& s) {
  require_compatible(u, s);
  ScalarField r = quadratic_gradient(u, s.alpha);
  r.axpy(-s.lambda, s.f);
  r += nl_weak_gradient(u, s.params.k);
  return r;
}

double residual_weak_pairing(const ScalarField& u, const ScalarField& w, const EnergySetting& s) {
  return inner(residual_weak(u, s), w);
}

ScalarField energy_gradient(const ScalarField& u, const EnergySetting& s) {
  return s.form == Form::Strong ? residual_strong(u, s) : residual_weak(u, s);
}

// --- cutoff -----------------------------------------------------------------

double CutoffSpec::profile(double R) const {
  if (R <= R0) return 1.0;
  if (R >= R1) return 0.0;
  const double t = (R - R0) / (R1 - R0);
  return std::clamp(1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t)), 0.0, 1.0);
}

double CutoffSpec::derivative(double R) const {
  if (R <= R0 || R >= R1) return 0.0;
  const double t = (R - R0) / (R1 - R0);
  return -30.0 * t * t * (1.0 - t) * (1.0 - t) / (R1 - R0);
}

void validate(const CutoffSpec& c) {
  if (!(c.R0 > 0.0 && c.R1 > c.R0)) throw DomainError("cutoff radii must satisfy 0 < R0 < R1");
}

double evaluate_H(const ScalarField& u, const EnergySetting& s, const CutoffSpec& c) {
  require_compatible(u, s);
  const double q2 = half_order(u, s.alpha).norm_squared();
  const double theta = c.profile(std::sqrt(q2));
  double h = 0.5 * q2 - s.lambda * inner(s.f, u);
  if (theta != 0.0) h += theta * nonlinear_energy(u, s);
  return h;
}

ScalarField gradient_H(const ScalarField& u, const EnergySetting& s, const CutoffSpec& c) {
  require_compatible(u, s);
  const double R = seminorm(u, s.alpha);
  const double theta = c.profile(R);
  ScalarField au = quadratic_gradient(u, s.alpha);
  ScalarField g = au;
  g.axpy(-s.lambda, s.f);
  if (theta != 0.0) g.axpy(theta, nonlinear_gradient(u, s));
  const double dtheta = c.derivative(R);
  // d/du profile(R) = profile'(R) * A u / R
  if (dtheta != 0.0) g.axpy(dtheta * nonlinear_energy(u, s) / R, au);
  return g;
}

// --- minorant ---------------------------------------------------------------

double radial_minorant(double R, const MinorantCoefficients& m) {
  return 0.5 * R * R - m.C1 * R - m.C2 * std::pow(R, m.k + 1);
}

namespace {

double bisect_root(const std::function<double(double)>& fn, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(50);
  auto r = boost::math::tools::bisect(fn, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

}  // namespace

MinorantRadii minorant_radii(const MinorantCoefficients& m) {
  if (m.C1 < 0.0 || !(m.C2 > 0.0) || m.k < 2) {
    throw GeometryError("minorant needs C1 >= 0, C2 > 0 and k >= 2");
  }
  const int k = m.k;
  auto slope = [&](double R) { return R - m.C1 - (k + 1) * m.C2 * std::pow(R, k); };
  // The slope is concave for R > 0 and peaks here.
  const double r_inflect = std::pow(1.0 / (k * (k + 1) * m.C2), 1.0 / (k - 1));
  if (slope(r_inflect) <= 0.0) throw GeometryError("radial minorant is nonincreasing; reduce |lambda|");
  double hi = 2.0 * r_inflect;
  while (slope(hi) >= 0.0) hi *= 2.0;
  MinorantRadii r;
  r.RM = bisect_root(slope, r_inflect, hi);
  r.peak = radial_minorant(r.RM, m);
  if (!(r.peak > 0.0)) {
    throw GeometryError("radial minorant never becomes positive (peak " + std::to_string(r.peak) +
                        "); reduce |lambda|");
  }
  auto reduced = [&](double R) { return 0.5 * R - m.C1 - m.C2 * std::pow(R, k); };
  r.R0 = m.C1 == 0.0 ? 0.5 * r.RM : bisect_root(reduced, 0.0, r.RM);
  r.R1 = 0.5 * (r.R0 + r.RM);
  double top = 2.0 * r.RM;
  while (reduced(top) >= 0.0) top *= 2.0;
  r.R2 = bisect_root(reduced, r.RM, top);
  return r;
}

ScalarField random_bump(const BoxDomain& d, int ghost_width, std::mt19937_64& rng) {
  double min_extent = d.extent[0];
  for (int a = 1; a < d.dim; ++a) min_extent = std::min(min_extent, d.extent[a]);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // At least four cells across so the bump is resolved.
  double hmax = 0.0;
  for (int a = 0; a < d.dim; ++a) hmax = std::max(hmax, d.spacing(a));
  const double rmin = std::min(0.45 * min_extent, std::max(0.15 * min_extent, 4.0 * hmax));
  const double radius = rmin + (0.45 * min_extent - rmin) * unit(rng);
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < d.dim; ++a) {
    const double margin = radius + 0.01 * d.extent[a];
    c[a] = margin + (d.extent[a] - 2.0 * margin) * unit(rng);
  }
  return bump_field(d, c, radius, 1.0, 1, ghost_width);
}

ScalarField random_smooth_field(const BoxDomain& d, int ghost_width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(0, 3);
  constexpr int kTerms = 4;
  double coeff[kTerms];
  int m[kTerms][3];
  double phase[kTerms][3];
  for (int t = 0; t < kTerms; ++t) {
    coeff[t] = unit(rng);
    for (int a = 0; a < 3; ++a) {
      m[t][a] = mode(rng);
      phase[t][a] = std::numbers::pi * unit(rng);
    }
  }
  const int window_power = std::max(2, ghost_width + 1);
  ScalarField u = sample(d, ghost_width, [&](const Point& x) {
    double window = 1.0;
    for (int a = 0; a < d.dim; ++a) window *= std::pow(std::sin(std::numbers::pi * x[a] / d.extent[a]), window_power);
    double v = 0.0;
    for (int t = 0; t < kTerms; ++t) {
      double term = coeff[t];
      for (int a = 0; a < d.dim; ++a) term *= std::cos(std::numbers::pi * m[t][a] * x[a] / d.extent[a] + phase[t][a]);
      v += term;
    }
    return window * v;
  });
  const double mx = u.max_abs();
  if (mx > 0.0) u *= 1.0 / mx;
  return u;
}

ScalarField gaussian_smooth(const ScalarField& u, double width) {
  const BoxDomain& d = u.domain();
  ScalarField cur = u;
  for (int a = 0; a < d.dim; ++a) {
    const double h = d.spacing(a);
    const int reach = static_cast<int>(std::ceil(4.0 * width / h));
    std::vector<double> kernel(2 * reach + 1);
    double total = 0.0;
    for (int i = -reach; i <= reach; ++i) {
      kernel[i + reach] = std::exp(-0.5 * (i * h) * (i * h) / (width * width));
      total += kernel[i + reach];
    }
    for (double& w : kernel) w /= total;
    ScalarField next(d, u.ghost_width());
    for_each_node(d, [&](const Index& idx, std::size_t f) {
      double s = 0.0;
      Index j = idx;
      for (int i = -reach; i <= reach; ++i) {
        j[a] = idx[a] + i;
        s += kernel[i + reach] * cur.at(j);
      }
      next[f] = s;
    });
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Nonlinear ratio: -nonlinear_energy(u) / seminorm(u)^(k+1), which C2 must dominate.
double nonlinear_ratio(const ScalarField& u, const EnergySetting& s) {
  const double R = seminorm(u, s.alpha);
  if (R == 0.0) return 0.0;
  return -nonlinear_energy(u, s) / std::pow(R, s.params.k + 1);
}

ScalarField normalized(ScalarField u, const EnergySetting& s) {
  const double R = seminorm(u, s.alpha);
  if (R > 0.0) u *= 1.0 / R;
  return u;
}

// Projected Sobolev-gradient ascent of the (degree-0 homogeneous) ratio on the unit sphere.
double ascend_ratio(ScalarField u, const EnergySetting& s, const PolyharmonicSolver& riesz, int iters) {
  const int k = s.params.k;
  u = normalized(std::move(u), s);
  double best = nonlinear_ratio(u, s);
  double tau = -1.0;
  for (int it = 0; it < iters; ++it) {
    const double n = -nonlinear_energy(u, s);
    ScalarField g = riesz.solve(-1.0 * nonlinear_gradient(u, s));
    g.axpy(-(k + 1) * n, u);
    const double gnorm = riesz.energy_norm(g);
    if (gnorm < 1e-14) break;
    if (tau < 0.0) tau = 0.1 / gnorm;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      ScalarField trial = u;
      trial.axpy(tau, g);
      trial = normalized(std::move(trial), s);
      const double r = nonlinear_ratio(trial, s);
      if (r > best) {
        best = r;
        u = std::move(trial);
        improved = true;
        tau *= 2.0;
        break;
      }
      tau *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

std::vector<ScalarField> sample_family(const EnergySetting& s, int count, std::mt19937_64& rng,
                                       const std::vector<ScalarField>& extra) {
  const BoxDomain& d = s.f.domain();
  std::vector<ScalarField> fam = extra;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  while (static_cast<int>(fam.size()) < count) {
    const int kind = static_cast<int>(fam.size() % 3);
    if (kind == 0) {
      ScalarField b = random_bump(d, s.alpha, rng);
      if (coef(rng) < 0.0) b *= -1.0;
      fam.push_back(std::move(b));
    } else if (kind == 1 || fam.size() < 2) {
      fam.push_back(random_smooth_field(d, s.alpha, rng));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
      const std::size_t i = pick(rng), j = pick(rng);
      ScalarField c = coef(rng) * fam[i];
      c.axpy(coef(rng), fam[j]);
      if (c.max_abs() == 0.0) c = fam[i];
      fam.push_back(std::move(c));
    }
  }
  return fam;
}

}  // namespace

MinorantFit fit_minorant(const EnergySetting& s, int samples, std::uint64_t seed, const PolyharmonicSolver& riesz) {
  validate(s);
  if (samples < 10) throw DomainError("fit_minorant needs at least 10 samples");
  if (!(riesz.domain() == s.f.domain()) || riesz.alpha() != s.alpha) {
    throw ContractError("fit_minorant: Riesz map does not match the setting");
  }
  const int k = s.params.k;
  MinorantFit fit;
  fit.coefficients.k = k;
  fit.samples = samples;

  // sup |integrate(f u)| / seminorm(u) is attained at A^{-1} f.
  const ScalarField dual = riesz.solve(s.f);
  const double dual_norm = std::sqrt(std::max(0.0, inner(s.f, dual)));
  fit.coefficients.C1 = std::abs(s.lambda) * dual_norm;

  std::mt19937_64 rng(seed);
  std::vector<ScalarField> extra;
  if (dual_norm > 0.0) extra.push_back(dual);
  ScalarField centre_bump = geometry_witnesses(s).psi;
  extra.push_back(centre_bump);
  const auto family = sample_family(s, samples, rng, extra);

  // Rank by the better of u and -u; odd-degree nonlinearities change sign with u.
  std::vector<std::pair<double, std::size_t>> ranked;
  double best = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double r = std::max(nonlinear_ratio(family[i], s), nonlinear_ratio(-1.0 * family[i], s));
    ranked.emplace_back(r, i);
    best = std::max(best, r);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const std::size_t polish = std::min<std::size_t>(3, ranked.size());
  for (std::size_t p = 0; p < polish; ++p) {
    ScalarField start = family[ranked[p].second];
    if (nonlinear_ratio(start, s) < nonlinear_ratio(-1.0 * start, s)) start *= -1.0;
    best = std::max(best, ascend_ratio(std::move(start), s, riesz, 40));
  }
  if (!(best > 0.0)) {
    throw GeometryError("minorant fit infeasible: no sampled field makes the nonlinear term negative");
  }
  fit.best_ratio = best;
  fit.coefficients.C2 = kMinorantSafety * best;

  // Fresh samples at several amplitudes.
  std::mt19937_64 check_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto fresh = sample_family(s, samples, check_rng, {});
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& v : fresh) {
    const double R = seminorm(v, s.alpha);
    if (R == 0.0) continue;
    for (double target : {0.01, 0.1, 1.0, 10.0}) {
      const ScalarField w = (target / R) * v;
      const double J = evaluate_energy(w, s);
      const double Rw = seminorm(w, s.alpha);
      const double scale = std::max({1.0, std::abs(J), Rw * Rw});
      margin = std::min(margin, (J - radial_minorant(Rw, fit.coefficients)) / scale);
      ++fit.verification_samples;
    }
  }
  fit.verification_margin = margin;
  return fit;
}

MinorantFit fit_minorant(const EnergySetting& s, int samples, std::uint64_t seed) {
  validate(s);
  const PolyharmonicSolver riesz(s.f.domain(), s.alpha);
  return fit_minorant(s, samples, seed, riesz);
}

GeometryWitnesses geometry_witnesses(const EnergySetting& s) {
  validate(s);
  const BoxDomain& d = s.f.domain();
  const int k = s.params.k;
  GeometryWitnesses w;

  if (s.lambda == 0.0) {
    w.phi = ScalarField(d, s.alpha);
    w.phi_trivial = true;
  } else {
    double hmax = 0.0;
    for (int a = 0; a < d.dim; ++a) hmax = std::max(hmax, d.spacing(a));
    bool ok = false;
    for (double width = 3.0 * hmax; width <= 0.5 && !ok; width *= 2.0) {
      ScalarField phi = gaussian_smooth(s.f, width);
      phi *= s.lambda > 0.0 ? 1.0 : -1.0;
      phi.set_ghost_width(s.alpha);
      const double check = s.lambda * inner(s.f, phi);
      if (check > 0.0) {
        w.phi = std::move(phi);
        w.phi_check = check;
        w.mollifier_width = width;
        ok = true;
      }
    }
    if (!ok) throw GeometryError("no mollification of f gives lambda * integrate(f phi) > 0");
  }

  double min_extent = d.extent[0];
  Point centre{0.0, 0.0, 0.0};
  for (int a = 0; a < d.dim; ++a) {
    min_extent = std::min(min_extent, d.extent[a]);
    centre[a] = 0.5 * d.extent[a];
  }
  for (double frac : {0.4, 0.3, 0.2}) {
    ScalarField psi = bump_field(d, centre, frac * min_extent, 1.0, k, s.alpha);
    double check = parity(k) * inner(psi, sk_field(psi, k));
    bool flipped = false;
    if (!(check > 0.0)) {
      psi *= -1.0;
      check = parity(k) * inner(psi, sk_field(psi, k));
      flipped = true;
    }
    if (check > 0.0) {
      w.psi = std::move(psi);
      w.psi_check = check;
      w.psi_flipped = flipped;
      return w;
    }
  }
  throw GeometryError("no bump witness with (-1)^k integrate(psi S_k[psi]) > 0");
}

}  // namespace polyhess
