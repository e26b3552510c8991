#include "polyhess/solvers.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/IterativeSolvers>

#include "polyhess/errors.hpp"
#include "polyhess/parallel.hpp"

namespace polyhess {

// --- matrix-free Hessian for MINRES ------------------------------------------

namespace detail {
class HessianOperator;
}  // namespace detail
}  // namespace polyhess

namespace Eigen::internal {
template <>
struct traits<polyhess::detail::HessianOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace polyhess {
namespace detail {

// Second variation of the energy at a fixed point, applied by exact central differences
// of the gradient (the gradient is a polynomial of degree k <= 4 along any line).
class HessianOperator : public Eigen::EigenBase<HessianOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  HessianOperator(const EnergySetting& s, const ScalarField& u) : s_(&s), u_(&u) {}

  Eigen::Index rows() const { return static_cast<Eigen::Index>(u_->size()); }
  Eigen::Index cols() const { return rows(); }

  template <class Rhs>
  Eigen::Product<HessianOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<HessianOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    ScalarField w(u_->domain(), u_->ghost_width(), std::vector<double>(x.data(), x.data() + x.size()));
    const double wmax = w.max_abs();
    if (wmax == 0.0) return Eigen::VectorXd::Zero(x.size());
    const double eps = std::max(u_->max_abs(), 1e-3) / wmax;
    auto g = [&](double t) {
      ScalarField v = *u_;
      v.axpy(t * eps, w);
      return energy_gradient(v, *s_);
    };
    ScalarField hv(u_->domain(), u_->ghost_width());
    if (s_->params.k <= 2) {
      hv = g(1.0) - g(-1.0);
      hv *= 1.0 / (2.0 * eps);
    } else {
      hv = 8.0 * (g(1.0) - g(-1.0)) - (g(2.0) - g(-2.0));
      hv *= 1.0 / (12.0 * eps);
    }
    return Eigen::Map<const Eigen::VectorXd>(hv.values().data(), x.size());
  }

 private:
  const EnergySetting* s_;
  const ScalarField* u_;
};

// SPD preconditioner backed by the polyharmonic factorisation.
class RieszPreconditioner {
 public:
  RieszPreconditioner() = default;
  void set(const PolyharmonicSolver* r) { riesz_ = r; }
  template <class M>
  RieszPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  RieszPreconditioner& factorize(const M&) { return *this; }
  template <class M>
  RieszPreconditioner& compute(const M&) { return *this; }
  template <class Rhs>
  Eigen::VectorXd solve(const Eigen::MatrixBase<Rhs>& b) const {
    const BoxDomain& d = riesz_->domain();
    Eigen::VectorXd bb = b;
    ScalarField r(d, riesz_->alpha(), std::vector<double>(bb.data(), bb.data() + bb.size()));
    ScalarField x = riesz_->solve(r);
    return Eigen::Map<const Eigen::VectorXd>(x.values().data(), bb.size());
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const PolyharmonicSolver* riesz_ = nullptr;
};

}  // namespace detail
}  // namespace polyhess

namespace Eigen::internal {
template <class Rhs>
struct generic_product_impl<polyhess::detail::HessianOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<polyhess::detail::HessianOperator, Rhs,
                                generic_product_impl<polyhess::detail::HessianOperator, Rhs>> {
  using Scalar = typename Product<polyhess::detail::HessianOperator, Rhs>::Scalar;
  template <class Dest>
  static void scaleAndAddTo(Dest& dst, const polyhess::detail::HessianOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace polyhess {

namespace {

ScalarField zero_like(const EnergySetting& s) { return ScalarField(s.f.domain(), s.alpha); }

ScalarField with_ghost(ScalarField u, int alpha) {
  if (u.ghost_width() < alpha) u.set_ghost_width(alpha);
  return u;
}

// Roundoff allowance for energy comparisons at the scale of the current iterate.
double energy_slack(double value, double quad) { return 64.0 * DBL_EPSILON * (std::abs(value) + quad + 1e-300); }

}  // namespace

void validate(const SolverConfig& c) {
  if (!(c.grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (c.max_iters < 1) throw ConfigError("max_iters must be positive");
  if (c.path_points < 16) throw ConfigError("path_points must be >= 16");
  if (!(c.deform_tol > 0.0)) throw ConfigError("deform_tol must be positive");
  if (c.step_rule.kind == StepKind::Backtracking &&
      !(c.step_rule.c > 0.0 && c.step_rule.c < 1.0 && c.step_rule.rho > 0.0 && c.step_rule.rho < 1.0)) {
    throw ConfigError("backtracking needs 0 < c < 1 and 0 < rho < 1");
  }
  if (c.step_rule.kind == StepKind::Fixed && !(c.step_rule.fixed > 0.0)) throw ConfigError("fixed step must be positive");
  if (c.fit_samples < 10) throw ConfigError("fit_samples must be >= 10");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
}

void PSRecord::push(double j, double r, double s) {
  J.push_back(j);
  residual.push_back(r);
  seminorm.push_back(s);
}

PSRecord PSRecord::downsampled(std::size_t max_rows) const {
  if (size() <= max_rows || max_rows < 2) return *this;
  PSRecord out;
  for (std::size_t i = 0; i < max_rows; ++i) {
    const std::size_t src = i * (size() - 1) / (max_rows - 1);
    out.push(J[src], residual[src], seminorm[src]);
  }
  return out;
}

// --- local minimisation -----------------------------------------------------

LocalMinResult minimize_local(const EnergySetting& s, const ScalarField& u0, const SolverConfig& cfg,
                              const CutoffSpec& c, const PolyharmonicSolver& riesz) {
  validate(s);
  validate(cfg);
  validate(c);
  if (!(u0.domain() == s.f.domain())) throw ContractError("minimize_local: start field on a different grid");
  LocalMinResult out;
  ScalarField u = with_ghost(u0, s.alpha);
  double h = evaluate_H(u, s, c);
  for (int it = 0;; ++it) {
    const ScalarField g = gradient_H(u, s, c);
    const double res = l2_norm(g);
    const double R = seminorm(u, s.alpha);
    out.record.push(h, res, R);
    if (R >= c.R1) {
      throw GeometryError("descent left the cutoff ball (seminorm " + std::to_string(R) + " >= R1 = " +
                          std::to_string(c.R1) + "); reduce |lambda|");
    }
    if (res <= cfg.grad_tol) {
      out.iterations = it;
      break;
    }
    if (it >= cfg.max_iters) throw NonConvergenceError("minimize_local: max_iters exceeded", out.record);

    ScalarField d = riesz.solve(g);
    d *= -1.0;
    const double slope = inner(g, d);
    const double slack = energy_slack(h, 0.5 * R * R);
    bool accepted = false;
    if (cfg.step_rule.kind == StepKind::Fixed) {
      ScalarField trial = u;
      trial.axpy(cfg.step_rule.fixed, d);
      const double ht = evaluate_H(trial, s, c);
      if (ht <= h + slack) {
        u = std::move(trial);
        h = ht;
        accepted = true;
      }
    } else {
      double tau = 1.0;
      for (int bt = 0; bt < 60 && !accepted; ++bt, tau *= cfg.step_rule.rho) {
        ScalarField trial = u;
        trial.axpy(tau, d);
        const double ht = evaluate_H(trial, s, c);
        if (ht <= h + cfg.step_rule.c * tau * slope + slack) {
          u = std::move(trial);
          h = ht;
          accepted = true;
        }
      }
    }
    if (!accepted) throw NonConvergenceError("minimize_local: no step decreases H (roundoff floor?)", out.record);
  }
  const double R = seminorm(u, s.alpha);
  if (!(R < c.R0)) {
    throw GeometryError("local minimiser has seminorm " + std::to_string(R) + " >= R0 = " + std::to_string(c.R0) +
                        ", so H differs from J there; reduce |lambda|");
  }
  out.residual = l2_norm(energy_gradient(u, s));
  out.u = std::move(u);
  return out;
}

LocalMinResult minimize_local(const EnergySetting& s, const ScalarField& u0, const SolverConfig& cfg,
                              const CutoffSpec& c) {
  validate(s);
  const PolyharmonicSolver riesz(s.f.domain(), s.alpha);
  return minimize_local(s, u0, cfg, c, riesz);
}

// --- mountain pass -----------------------------------------------------------

namespace {

// Re-places the interior nodes at equal arc length (energy seminorm) along the polyline.
std::vector<ScalarField> equidistribute(const std::vector<ScalarField>& poly, int count,
                                        const PolyharmonicSolver& riesz) {
  std::vector<double> arc(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i) arc[i] = arc[i - 1] + riesz.energy_norm(poly[i] - poly[i - 1]);
  const double total = arc.back();
  std::vector<ScalarField> out;
  out.reserve(count);
  out.push_back(poly.front());
  std::size_t seg = 1;
  for (int j = 1; j < count - 1; ++j) {
    const double target = total * j / (count - 1);
    while (seg < poly.size() - 1 && arc[seg] < target) ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double t = len > 0.0 ? (target - arc[seg - 1]) / len : 0.0;
    ScalarField p = poly[seg - 1];
    p.axpy(t, poly[seg] - poly[seg - 1]);
    out.push_back(std::move(p));
  }
  out.push_back(poly.back());
  return out;
}

// Largest transverse move per sweep, as a fraction of the path node spacing.
constexpr double kMaxMove = 0.1;

// The whole-path phase only has to find where the path crosses the ridge; the ray stage finishes.
constexpr int kPathSweeps = 20;

std::size_t argmax_lowest(const std::vector<double>& e) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i] > e[best]) best = i;
  return best;
}

// Maximiser of t -> J[base + t dir] for t > 0, bracketed by walking out from t0.
// Empty when the energy keeps rising or the walk reaches the base point.
std::optional<double> ray_maximum(const EnergySetting& s, const ScalarField& base, const ScalarField& dir, double t0) {
  auto f = [&](double t) {
    ScalarField p = base;
    p.axpy(t, dir);
    return evaluate_energy(p, s);
  };
  constexpr double kGrow = 1.5;
  double mid = t0, fm = f(mid);
  double hi = mid * kGrow, fh = f(hi);
  double lo = mid / kGrow;
  if (fh > fm) {
    lo = mid;
    for (int i = 0; fh > fm; ++i) {
      if (i > 60) return std::nullopt;
      lo = mid;
      mid = hi;
      fm = fh;
      hi *= kGrow;
      fh = f(hi);
    }
  } else {
    double fl = f(lo);
    for (int i = 0; fl > fm; ++i) {
      if (i > 60) return std::nullopt;
      hi = mid;
      mid = lo;
      fm = fl;
      lo /= kGrow;
      fl = f(lo);
    }
  }
  const auto r = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi, 40);
  return r.first;
}

// Ray stage hands over to Newton once the tangential gradient is this small relative to the ray length.
constexpr double kRayHandoff = 1e-6;

}  // namespace

MountainPassResult mountain_pass(const EnergySetting& s, const ScalarField& u_m, const ScalarField& v_far,
                                 const SolverConfig& cfg, const PolyharmonicSolver& riesz, const ScalarField* via) {
  validate(s);
  validate(cfg);
  const double J_m = evaluate_energy(u_m, s);
  if (!(evaluate_energy(v_far, s) < J_m)) throw GeometryError("mountain_pass: J[v_far] must be below J[u_m]");

  MountainPassResult out;
  const int P = cfg.path_points;
  std::vector<ScalarField> poly{with_ghost(u_m, s.alpha)};
  if (via) poly.push_back(with_ghost(*via, s.alpha));
  poly.push_back(with_ghost(v_far, s.alpha));
  std::vector<ScalarField> path = equidistribute(poly, P, riesz);

  std::vector<double> energy(P);
  std::vector<double> step(P, 1.0);
  std::vector<double> history;
  for (int i = 0; i < P; ++i) energy[i] = evaluate_energy(path[i], s);

  ScalarField top;
  bool converged = false;
  int it = 0;
  // Phase 1: deform the whole path downhill, transverse to itself.
  for (; it < cfg.max_iters; ++it) {
    const std::size_t imax = argmax_lowest(energy);
    if (imax == 0 || imax == static_cast<std::size_t>(P - 1)) {
      throw GeometryError("path maximum collapsed onto an endpoint");
    }
    const ScalarField gmax = energy_gradient(path[imax], s);
    const double res = l2_norm(gmax);
    out.record.push(energy[imax], res, seminorm(path[imax], s.alpha));
    top = path[imax];
    if (res <= cfg.grad_tol) {
      converged = true;
      break;
    }
    if (it >= kPathSweeps) break;
    history.push_back(energy[imax]);
    if (history.size() > 10) {
      const double prev = history[history.size() - 11];
      if (std::abs(energy[imax] - prev) <= cfg.deform_tol * std::abs(energy[imax])) break;
    }
    // Steps are capped at a fraction of the node spacing so points cannot hop across the ridge.
    const double spacing = riesz.energy_norm(path[1] - path[0]);
    for (int i = 1; i < P - 1; ++i) {
      ScalarField tangent = path[i + 1] - path[i - 1];
      const double tn = riesz.energy_norm(tangent);
      if (tn > 0.0) tangent *= 1.0 / tn;
      const ScalarField g = static_cast<std::size_t>(i) == imax ? gmax : energy_gradient(path[i], s);
      ScalarField d = riesz.solve(g);
      d.axpy(-riesz.energy_inner(d, tangent), tangent);
      d *= -1.0;
      const double dn = riesz.energy_norm(d);
      if (dn == 0.0) continue;
      const double slope = inner(g, d);
      double tau = std::min(step[i], kMaxMove * spacing / dn);
      for (int bt = 0; bt < 30; ++bt, tau *= 0.5) {
        ScalarField trial = path[i];
        trial.axpy(tau, d);
        const double e = evaluate_energy(trial, s);
        if (e <= energy[i] + 1e-4 * tau * slope) {
          path[i] = std::move(trial);
          step[i] = std::min(1.0, 2.0 * tau);
          break;
        }
      }
    }
    // Cut the tail at the first node past the maximum that is already below J[u_m]; any such
    // node lies outside the mountain ring, so it is an admissible far endpoint.
    for (int i = 1; i < P - 1; ++i) energy[i] = evaluate_energy(path[i], s);
    const std::size_t peak = argmax_lowest(energy);
    for (int j = static_cast<int>(peak) + 1; j < P - 1; ++j) {
      if (energy[j] < J_m) {
        path.resize(j + 1);
        energy[P - 1] = energy[j];
        break;
      }
    }
    path = equidistribute(path, P, riesz);
    for (int i = 1; i < P - 1; ++i) energy[i] = evaluate_energy(path[i], s);
  }
  out.deform_iterations = it;

  // Phase 2: slide the path maximum along the ridge.  The path is the ray from u_m through the
  // current maximum; each step descends transverse to the ray and re-maximises along the new ray.
  // This keeps the iterate on the mountain-pass ridge, where Newton alone can drift to saddles
  // of higher index.
  if (!converged) {
    ScalarField dir = top - with_ghost(u_m, s.alpha);
    double t = riesz.energy_norm(dir);
    if (t > 0.0) dir *= 1.0 / t;
    const ScalarField base = with_ghost(u_m, s.alpha);
    std::optional<double> tm = t > 0.0 ? ray_maximum(s, base, dir, t) : std::nullopt;
    if (tm) {
      t = *tm;
      ScalarField p = base;
      p.axpy(t, dir);
      double Jp = evaluate_energy(p, s);
      double sigma = 1.0;
      for (int rit = 0; rit < cfg.max_iters; ++rit, ++out.ray_iterations) {
        const ScalarField g = energy_gradient(p, s);
        const double res = l2_norm(g);
        out.record.push(Jp, res, seminorm(p, s.alpha));
        top = p;
        if (res <= cfg.grad_tol) {
          converged = true;
          break;
        }
        ScalarField d = riesz.solve(g);
        d.axpy(-riesz.energy_inner(d, dir), dir);
        const double dn = riesz.energy_norm(d);
        if (dn <= kRayHandoff * t) break;
        bool accepted = false;
        for (int bt = 0; bt < 40 && !accepted; ++bt, sigma *= 0.5) {
          ScalarField q = p;
          q.axpy(-sigma, d);
          ScalarField v = q - base;
          const double vn = riesz.energy_norm(v);
          if (!(vn > 0.0)) continue;
          v *= 1.0 / vn;
          const std::optional<double> tn = ray_maximum(s, base, v, t);
          if (!tn) continue;
          ScalarField pn = base;
          pn.axpy(*tn, v);
          const double Jn = evaluate_energy(pn, s);
          if (Jn <= Jp - 1e-4 * sigma * dn * dn) {
            p = std::move(pn);
            dir = std::move(v);
            t = *tn;
            Jp = Jn;
            accepted = true;
          }
        }
        if (!accepted) break;
        sigma *= 4.0;  // undo the last halving and try a longer step next time
      }
    }
  }

  // Phase 3: damped Newton on the gradient from the path maximum; MINRES handles the indefinite Hessian.
  ScalarField u = top;
  if (!converged) {
    auto merit = [&](const ScalarField& g) { return riesz.energy_inner(riesz.solve(g), riesz.solve(g)); };
    ScalarField g = energy_gradient(u, s);
    double m = merit(g);
    detail::RieszPreconditioner pre;
    for (int nit = 0; nit < cfg.max_iters; ++nit) {
      if (nit > 0) out.record.push(evaluate_energy(u, s), l2_norm(g), seminorm(u, s.alpha));
      if (l2_norm(g) <= cfg.grad_tol) {
        converged = true;
        out.refine_iterations = nit;
        break;
      }
      if (nit >= 60) break;
      detail::HessianOperator hess(s, u);
      Eigen::MINRES<detail::HessianOperator, Eigen::Lower | Eigen::Upper, detail::RieszPreconditioner> minres;
      minres.preconditioner().set(&riesz);
      minres.compute(hess);
      minres.setTolerance(1e-10);
      minres.setMaxIterations(400);
      const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(g.values().data(), g.size());
      const Eigen::VectorXd delta = minres.solve(rhs);
      ScalarField dfield(u.domain(), s.alpha, std::vector<double>(delta.data(), delta.data() + delta.size()));
      bool accepted = false;
      double t = 1.0;
      for (int bt = 0; bt < 30 && !accepted; ++bt, t *= 0.5) {
        ScalarField trial = u;
        trial.axpy(t, dfield);
        ScalarField gt = energy_gradient(trial, s);
        const double mt = merit(gt);
        if (mt < (1.0 - 1e-4 * t) * m || l2_norm(gt) < l2_norm(g)) {
          u = std::move(trial);
          g = std::move(gt);
          m = mt;
          accepted = true;
        }
      }
      if (!accepted) break;
    }
  }
  if (!converged) throw NonConvergenceError("mountain_pass: residual did not reach grad_tol", out.record);
  out.residual = l2_norm(energy_gradient(u, s));
  out.u_star = std::move(u);
  return out;
}

MountainPassResult mountain_pass(const EnergySetting& s, const ScalarField& u_m, const ScalarField& v_far,
                                 const SolverConfig& cfg) {
  validate(s);
  const PolyharmonicSolver riesz(s.f.domain(), s.alpha);
  return mountain_pass(s, u_m, v_far, cfg, riesz);
}

// --- orchestration -----------------------------------------------------------

TwoSolutionRun two_solutions(const EnergySetting& s, const SolverConfig& cfg, const SolutionPair* warm) {
  validate(s);
  validate(cfg);
  const PolyharmonicSolver riesz(s.f.domain(), s.alpha);
  TwoSolutionRun run;
  run.fit = fit_minorant(s, cfg.fit_samples, cfg.seed, riesz);
  run.radii = minorant_radii(run.fit.coefficients);
  run.cutoff = CutoffSpec{run.radii.R0, run.radii.R1};
  run.witnesses = geometry_witnesses(s);

  ScalarField u0 = zero_like(s);
  if (warm && warm->u_m.domain() == s.f.domain() && seminorm(warm->u_m, s.alpha) < run.radii.R0) u0 = warm->u_m;
  LocalMinResult local = minimize_local(s, u0, cfg, run.cutoff, riesz);
  run.min_record = local.record;
  const double J_m = evaluate_energy(local.u, s);

  const ScalarField& psi = run.witnesses.psi;
  double t = 1.0;
  for (int i = 0;; ++i, t *= 2.0) {
    if (i > 60) throw GeometryError("far endpoint scan did not terminate");
    const ScalarField v = t * psi;
    if (evaluate_energy(v, s) < J_m && seminorm(v, s.alpha) > run.radii.RM) break;
  }
  run.far_scale = t;
  const ScalarField v_far = t * psi;
  const ScalarField* via = nullptr;
  if (warm && warm->u_star.domain() == s.f.domain()) via = &warm->u_star;
  MountainPassResult mp = mountain_pass(s, local.u, v_far, cfg, riesz, via);
  run.mp_record = mp.record;

  SolutionPair& pair = run.pair;
  pair.u_m = std::move(local.u);
  pair.u_star = std::move(mp.u_star);
  pair.J_m = J_m;
  pair.J_star = evaluate_energy(pair.u_star, s);
  pair.residual_m = local.residual;
  pair.residual_star = mp.residual;
  pair.sep = seminorm(pair.u_m - pair.u_star, s.alpha);

  if (pair.residual_m > cfg.grad_tol || pair.residual_star > cfg.grad_tol) {
    throw NonConvergenceError("solution residuals above grad_tol", mp.record);
  }
  const bool ordered = s.lambda != 0.0 ? (pair.J_m < 0.0 && pair.J_star > 0.0) : (pair.J_m <= 0.0 && pair.J_star > 0.0);
  if (!ordered) {
    throw GeometryError("energy levels J_m = " + std::to_string(pair.J_m) + ", J_star = " + std::to_string(pair.J_star) +
                        " are not separated by zero");
  }
  if (!(pair.sep > 0.0)) throw GeometryError("the two critical points coincide");
  return run;
}

TwoSolutionRun weak_two_solutions(const EnergySetting& s, const SolverConfig& cfg, const SolutionPair* warm) {
  if (s.params.N > 3) {
    throw CapabilityError("weak_two_solutions supports grids with N <= 3 only (requested N = " +
                          std::to_string(s.params.N) + ")");
  }
  if (s.form != Form::Weak) throw ContractError("weak_two_solutions requires the weak form");
  if (s.alpha != alpha_weak(s.params)) throw ContractError("weak_two_solutions requires alpha = alpha_weak(N, k)");
  return two_solutions(s, cfg, warm);
}

// --- probes -------------------------------------------------------------------


ProbeReport ball_uniqueness_probe(const EnergySetting& s, const SolverConfig& cfg, int trials) {
  validate(s);
  validate(cfg);
  if (trials < 5) throw DomainError("ball_uniqueness_probe needs at least 5 trials");
  const PolyharmonicSolver riesz(s.f.domain(), s.alpha);
  const MinorantFit fit = fit_minorant(s, cfg.fit_samples, cfg.seed, riesz);
  const MinorantRadii radii = minorant_radii(fit.coefficients);
  const CutoffSpec cutoff{radii.R0, radii.R1};

  ProbeReport report;
  report.R0 = radii.R0;
  report.trials.resize(trials);
  run_indexed(trials, cfg.jobs, [&](int i) {
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(i), std::uint64_t{0x5eed}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    ScalarField u0 = random_smooth_field(s.f.domain(), s.alpha, rng);
    const double target = frac(rng) * radii.R0;
    u0 *= target / seminorm(u0, s.alpha);
    ProbeTrial& trial = report.trials[i];
    trial.start_seminorm = seminorm(u0, s.alpha);
    try {
      LocalMinResult r = minimize_local(s, u0, cfg, cutoff, riesz);
      trial.converged = true;
      trial.residual = r.residual;
      trial.u = std::move(r.u);
    } catch (const std::exception& e) {
      trial.error = e.what();
    }
  });
  std::vector<int> ok;
  for (int i = 0; i < trials; ++i) {
    if (report.trials[i].converged) {
      ok.push_back(i);
    } else {
      report.failures.push_back(i);
    }
  }
  for (std::size_t a = 0; a < ok.size(); ++a)
    for (std::size_t b = a + 1; b < ok.size(); ++b)
      report.max_distance = std::max(
          report.max_distance, seminorm(report.trials[ok[a]].u - report.trials[ok[b]].u, s.alpha));
  report.success = report.failures.empty() && report.max_distance <= 10.0 * cfg.grad_tol;
  return report;
}

ContinuationResult continuation_in_lambda(const EnergySetting& s, const std::vector<double>& lambdas,
                                          const SolverConfig& cfg) {
  validate(s);
  validate(cfg);
  if (lambdas.empty() || lambdas.front() != 0.0) throw DomainError("lambda schedule must start at 0");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) throw DomainError("lambda schedule must be increasing");
  }
  ContinuationResult out;
  std::optional<SolutionPair> warm;
  for (double lambda : lambdas) {
    EnergySetting row_setting = s;
    row_setting.lambda = lambda;
    ContinuationRow row;
    row.lambda = lambda;
    try {
      TwoSolutionRun run = two_solutions(row_setting, cfg, warm ? &*warm : nullptr);
      row.J_m = run.pair.J_m;
      row.J_star = run.pair.J_star;
      row.sep = run.pair.sep;
      row.converged = true;
      warm = run.pair;
      out.lambda0_lower_bound = lambda;
      out.last_pair = run.pair;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace polyhess
