#include "polyhess/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/format.hpp>

#include "polyhess/energy.hpp"
#include "polyhess/errors.hpp"
#include "polyhess/exponents.hpp"
#include "polyhess/hessian_algebra.hpp"
#include "polyhess/parallel.hpp"

namespace polyhess {

namespace {

using CheckFn = std::function<CheckResult(std::uint64_t seed)>;

struct Check {
  std::string suite;
  std::string name;
  CheckFn run;
};

CheckResult result(bool passed, double value, double tol, std::string detail = {}) {
  CheckResult r;
  r.passed = passed;
  r.value = value;
  r.tolerance = tol;
  r.detail = std::move(detail);
  return r;
}

SymmetricMatrix random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SymmetricMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a.set(i, j, unit(rng));
  return a;
}

std::vector<double> eigenvalues(const SymmetricMatrix& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + a.dim()};
}

// --- algebra ------------------------------------------------------------------

CheckResult eigen_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 6);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const SymmetricMatrix a = random_symmetric(dim(rng), rng);
    const std::vector<double> lam = eigenvalues(a);
    std::vector<double> abs_lam(lam.size());
    std::transform(lam.begin(), lam.end(), abs_lam.begin(), [](double x) { return std::abs(x); });
    for (int k = 1; k <= a.dim(); ++k) {
      // Scale by sigma_k(|lambda|) so near-cancelling sums are judged fairly.
      const double scale = std::max(sigma_k(abs_lam, k), 1e-300);
      worst = std::max(worst, std::abs(sk_of_matrix(a, k) - sigma_k(lam, k)) / scale);
    }
  }
  return result(worst < 1e-10, worst, 1e-10, "1000 matrices, N in 2..6, all k");
}

CheckResult shifted_trace(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> mu(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const SymmetricMatrix a = random_symmetric(dim(rng), rng);
    std::uniform_int_distribution<int> kd(1, a.dim());
    const auto [lhs, rhs] = shifted_trace_identity(a, mu(rng), kd(rng));
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return result(worst < 1e-9, worst, 1e-9, "1000 (A, mu, k) triples");
}

CheckResult cofactor_fd(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 6);
  constexpr double eps = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const SymmetricMatrix a = random_symmetric(dim(rng), rng);
    std::uniform_int_distribution<int> kd(1, a.dim());
    const int k = kd(rng);
    const SymmetricMatrix s = sk_partials(a, k);
    for (int i = 0; i < a.dim(); ++i) {
      for (int j = i; j < a.dim(); ++j) {
        SymmetricMatrix p = a, m = a;
        p.add(i, j, eps);
        m.add(i, j, -eps);
        double fd = (sk_of_matrix(p, k) - sk_of_matrix(m, k)) / (2.0 * eps);
        if (i != j) fd *= 0.5;
        worst = std::max(worst, std::abs(fd - s(i, j)));
      }
    }
  }
  return result(worst < 1e-7, worst, 1e-7, "200 matrices, symmetric central differences");
}

CheckResult euler_identity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 6);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const SymmetricMatrix a = random_symmetric(dim(rng), rng);
    for (int k = 1; k <= a.dim(); ++k) {
      const double lhs = a.contract(sk_partials(a, k));
      worst = std::max(worst, std::abs(lhs - k * sk_of_matrix(a, k)) / (1.0 + std::abs(lhs)));
    }
  }
  return result(worst < 1e-12, worst, 1e-12, "sum a_ij S_ij = k sigma_k");
}

// --- exponents ----------------------------------------------------------------

template <class Pred>
CheckResult sweep(Pred&& bad, const std::string& detail) {
  int failures = 0;
  std::string first;
  for (int N = 2; N <= 30; ++N) {
    for (int k = 2; k <= N; ++k) {
      if (bad(ProblemParams{N, k})) {
        if (failures++ == 0) first = " (first: N=" + std::to_string(N) + ", k=" + std::to_string(k) + ")";
      }
    }
  }
  return result(failures == 0, failures, 0.0, detail + first);
}

CheckResult alpha_lower_bound(std::uint64_t) {
  return sweep([](const ProblemParams& p) { return alpha_main(p) < 2 || alpha_weak(p) < 2; },
               "alpha_main, alpha_weak >= 2 for N <= 30");
}

CheckResult super_closed_forms(std::uint64_t) {
  return sweep(
      [](const ProblemParams& p) {
        if (classify_regime(p) != Regime::Super) return false;
        int expect;
        if (p.N % 2 == 0) {
          expect = (p.N + 2) / 2;
        } else {
          expect = p.k <= (2 * p.N) / 3 ? (p.N + 1) / 2 : (p.N + 3) / 2;
        }
        return alpha_main(p) != expect;
      },
      "even/odd closed forms match alpha_main in SUPER");
}

CheckResult sub_pstar_bounds(std::uint64_t) {
  return sweep(
      [](const ProblemParams& p) {
        if (classify_regime(p) != Regime::Sub) return false;
        const Rational ps = lebesgue_exponents(p).p_star;
        return !(ps > Rational(1) && ps < Rational(3, 2));
      },
      "1 < p* < 3/2 in SUB");
}

CheckResult holder_duality(std::uint64_t) {
  return sweep(
      [](const ProblemParams& p) {
        const LebesgueExponents e = lebesgue_exponents(p);
        if (e.q_star && Rational(1) / e.p_star + Rational(1) / *e.q_star != Rational(1)) return true;
        return Rational(2) / e.q_tilde + Rational(1) / e.p_tilde != Rational(1);
      },
      "1/p* + 1/q* = 1 and 2/q~ + 1/p~ = 1 exactly");
}

CheckResult critical_coincidence(std::uint64_t) {
  return sweep(
      [](const ProblemParams& p) { return 2 * p.k == p.N && alpha_weak(p) != alpha_main(p); },
      "alpha_weak(N, N/2) = alpha_main(N, N/2)");
}

CheckResult weak_not_above_main(std::uint64_t) {
  return sweep([](const ProblemParams& p) { return alpha_weak(p) > alpha_main(p); }, "alpha_weak <= alpha_main");
}

// --- grid ---------------------------------------------------------------------

CheckResult divergence_structure(int N, int k, std::vector<int> ns) {
  std::vector<double> err, h;
  for (int n : ns) {
    const BoxDomain d = BoxDomain::cube(N, n);
    err.push_back(integrate(sk_field(standard_bump(d, 2), k)));
    h.push_back(d.spacing(0));
  }
  const std::size_t f = err.size() - 1;
  const double order = observed_order(err[f - 1], err[f], h[f - 1], h[f]);
  std::ostringstream detail;
  detail << "n =";
  for (int n : ns) detail << " " << n;
  detail << ", integrals";
  for (double e : err) detail << " " << boost::format("%.3e") % e;
  return result(order >= 1.5, order, 1.5, detail.str());
}

CheckResult integration_by_parts(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int N : {2, 3}) {
    const BoxDomain d = BoxDomain::cube(N, N == 2 ? 40 : 16);
    for (int t = 0; t < 5; ++t) {
      // Raw random values: the identity is algebraic, smoothness is irrelevant.
      std::normal_distribution<double> g;
      ScalarField u = sample(d, 1, [&](const Point&) { return g(rng); });
      ScalarField w = sample(d, 1, [&](const Point&) { return g(rng); });
      const double a = inner(w, laplacian(u));
      const double b = inner(u, laplacian(w));
      const double scale = l2_norm(u) * l2_norm(w) / (d.spacing(0) * d.spacing(0));
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  return result(worst < 1e-12, worst, 1e-12, "<w, Lap u> = <u, Lap w>, N = 2, 3");
}

CheckResult energy_identity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int alpha = 2; alpha <= 3; ++alpha) {
    const BoxDomain d = BoxDomain::cube(2, 32);
    for (int t = 0; t < 5; ++t) {
      const ScalarField u = random_smooth_field(d, alpha, rng);
      const double sign = alpha % 2 == 0 ? 1.0 : -1.0;
      const double lhs = sign * inner(u, polyharmonic(u, alpha));
      const double rhs = half_order(u, alpha).norm_squared();
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  }
  return result(worst < 1e-10, worst, 1e-10, "<u, (-1)^a Lap^a u> = |half_order u|^2, alpha = 2, 3");
}

CheckResult stencil_linearity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const BoxDomain d = BoxDomain::cube(3, 12);
  const ScalarField u = sample(d, 2, [&](const Point&) { return g(rng); });
  const ScalarField w = sample(d, 2, [&](const Point&) { return g(rng); });
  const double a = g(rng), b = g(rng);
  const ScalarField mix = a * u + b * w;
  double worst = 0.0;
  auto compare = [&](const ScalarField& lhs, const ScalarField& rhs) {
    worst = std::max(worst, (lhs - rhs).max_abs() / std::max(1.0, rhs.max_abs()));
  };
  compare(laplacian(mix), a * laplacian(u) + b * laplacian(w));
  compare(polyharmonic(mix, 2), a * polyharmonic(u, 2) + b * polyharmonic(w, 2));
  const auto gm = gradient(mix), gu = gradient(u), gw = gradient(w);
  for (int i = 0; i < 3; ++i) compare(gm[i], a * gu[i] + b * gw[i]);
  const MatrixField hm = hessian(mix), hu = hessian(u), hw = hessian(w);
  for (std::size_t p = 0; p < hm.values.size(); ++p) {
    const SymmetricMatrix diff = hm.values[p] - (hu.values[p] * a + hw.values[p] * b);
    worst = std::max(worst, diff.norm() / std::max(1.0, hm.values[p].norm()));
  }
  return result(worst < 1e-12, worst, 1e-12, "Lap, Lap^2, grad, Hessian");
}

// --- energy -------------------------------------------------------------------

CheckResult gradient_consistency(std::uint64_t seed, Form form) {
  const BoxDomain d = BoxDomain::cube(2, 64);
  const ScalarField f = sample(d, 2, [](const Point&) { return 1.0; });
  const EnergySetting s = make_setting(ProblemParams{2, 2}, 0.05, f, form);
  std::mt19937_64 rng(seed);
  constexpr double eps = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const ScalarField u = random_smooth_field(d, s.alpha, rng);
    const ScalarField w = random_smooth_field(d, s.alpha, rng);
    const double fd = (evaluate_energy(u + eps * w, s) - evaluate_energy(u - eps * w, s)) / (2.0 * eps);
    const double pairing = form == Form::Strong ? inner(residual_strong(u, s), w) : residual_weak_pairing(u, w, s);
    worst = std::max(worst, std::abs(pairing - fd) / std::max(std::abs(fd), 1e-12));
  }
  return result(worst < 1e-4, worst, 1e-4, "50 (u, w) pairs, n = 64, N = k = alpha = 2");
}

std::vector<Check> all_checks() {
  return {
      {"algebra", "eigen_oracle", eigen_oracle},
      {"algebra", "shifted_trace", shifted_trace},
      {"algebra", "cofactor_fd", cofactor_fd},
      {"algebra", "euler_identity", euler_identity},
      {"exponents", "alpha_lower_bound", alpha_lower_bound},
      {"exponents", "super_closed_forms", super_closed_forms},
      {"exponents", "sub_pstar_bounds", sub_pstar_bounds},
      {"exponents", "holder_duality", holder_duality},
      {"exponents", "critical_coincidence", critical_coincidence},
      {"exponents", "weak_not_above_main", weak_not_above_main},
      {"grid", "divergence_N2_k2", [](std::uint64_t) { return divergence_structure(2, 2, {32, 64, 128}); }},
      // The bump needs finer 3-D grids than 32 before the second-order term dominates.
      {"grid", "divergence_N3_k2", [](std::uint64_t) { return divergence_structure(3, 2, {48, 64, 96}); }},
      {"grid", "divergence_N3_k3", [](std::uint64_t) { return divergence_structure(3, 3, {48, 64, 96}); }},
      {"grid", "integration_by_parts", integration_by_parts},
      {"grid", "energy_identity", energy_identity},
      {"grid", "stencil_linearity", stencil_linearity},
      {"energy", "gradient_strong", [](std::uint64_t s) { return gradient_consistency(s, Form::Strong); }},
      {"energy", "gradient_weak", [](std::uint64_t s) { return gradient_consistency(s, Form::Weak); }},
  };
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "exponents", "grid", "energy"};
  return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opt) {
  for (const auto& s : opt.suites) {
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  std::vector<Check> selected;
  for (auto& c : all_checks()) {
    if (opt.suites.empty() || std::find(opt.suites.begin(), opt.suites.end(), c.suite) != opt.suites.end()) {
      selected.push_back(std::move(c));
    }
  }
  std::vector<CheckResult> out(selected.size());
  run_indexed(static_cast<int>(selected.size()), opt.jobs, [&](int i) {
    // Each check draws from its own stream so results do not depend on the selection.
    std::seed_seq seq(selected[i].name.begin(), selected[i].name.end());
    std::uint32_t salt;
    seq.generate(&salt, &salt + 1);
    try {
      out[i] = selected[i].run(opt.seed ^ (std::uint64_t{salt} << 32));
    } catch (const std::exception& e) {
      out[i] = result(false, 0.0, 0.0, std::string("threw: ") + e.what());
    }
    out[i].suite = selected[i].suite;
    out[i].name = selected[i].name;
  });
  return out;
}

std::string format_table(const std::vector<CheckResult>& results) {
  std::ostringstream o;
  o << boost::format("%-10s %-22s %-5s %12s %12s  %s\n") % "suite" % "check" % "ok" % "value" % "tolerance" %
           "detail";
  int failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    o << boost::format("%-10s %-22s %-5s %12.4e %12.4e  %s\n") % r.suite % r.name % (r.passed ? "PASS" : "FAIL") %
             r.value % r.tolerance % r.detail;
  }
  o << results.size() - failed << "/" << results.size() << " checks passed\n";
  return o.str();
}

ScalarField standard_bump(const BoxDomain& d, int ghost_width) {
  double r = d.extent[0];
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < d.dim; ++a) {
    r = std::min(r, d.extent[a]);
    c[a] = 0.5 * d.extent[a];
  }
  return bump_field(d, c, 0.45 * r, 1.0, 1, ghost_width);
}

double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(std::abs(e_coarse) / std::abs(e_fine)) / std::log(h_coarse / h_fine);
}

}  // namespace polyhess
