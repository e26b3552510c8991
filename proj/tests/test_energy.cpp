#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polyhess/energy.hpp"
#include "polyhess/errors.hpp"
#include "polyhess/verify.hpp"

using namespace polyhess;

namespace {

EnergySetting flagship(int n, double lambda, Form form = Form::Strong) {
  const BoxDomain d = BoxDomain::cube(2, n);
  return make_setting({2, 2}, lambda, sample(d, 2, [](const Point&) { return 1.0; }), form);
}

double fd_directional(const ScalarField& u, const ScalarField& w, const EnergySetting& s) {
  const double eps = 1e-5;
  return (evaluate_energy(u + eps * w, s) - evaluate_energy(u - eps * w, s)) / (2 * eps);
}

// Largest positive root and maximiser of 1/2 R^2 - c1 R - c2 R^3 in closed form.
struct CubicMinorant {
  double lower, upper, peak_at;
};
CubicMinorant cubic_minorant(double c1, double c2) {
  const double disc = std::sqrt(0.25 - 4 * c1 * c2);
  return {(0.5 - disc) / (2 * c2), (0.5 + disc) / (2 * c2), (1 + std::sqrt(1 - 12 * c1 * c2)) / (6 * c2)};
}

}  // namespace

TEST_CASE("setting validation") {
  const BoxDomain d = BoxDomain::cube(2, 16);
  const ScalarField f = sample(d, 2, [](const Point&) { return 1.0; });
  CHECK(make_setting({2, 2}, 0.1, f, Form::Strong).alpha == 2);
  CHECK(make_setting({2, 2}, 0.1, f, Form::Strong, 3).alpha_overridden);
  CHECK_THROWS_AS(make_setting({3, 2}, 0.1, f, Form::Strong), DomainError);
  CHECK_THROWS_AS(make_setting({2, 2}, 0.1, f, Form::Strong, 1), DomainError);
  EnergySetting big = make_setting({2, 2}, 0.1, f, Form::Strong);
  big.params = {5, 2};
  CHECK_THROWS_AS(validate(big), CapabilityError);
  CHECK(parse_form("weak") == Form::Weak);
  CHECK_THROWS_AS(parse_form("mild"), ConfigError);
}

TEST_CASE("zero field") {
  const EnergySetting s = flagship(32, 0.3);
  const ScalarField z(s.f.domain(), 2);
  CHECK(evaluate_J(z, s) == 0.0);
  CHECK(evaluate_J_weak(z, s) == 0.0);
  CHECK(evaluate_H(z, s, {1.0, 2.0}) == 0.0);
  CHECK((residual_strong(z, s) + 0.3 * s.f).max_abs() == 0.0);
  CHECK((residual_collocated(z, s) + 0.3 * s.f).max_abs() == 0.0);
  std::mt19937_64 rng(1);
  const ScalarField w = random_smooth_field(s.f.domain(), 2, rng);
  CHECK(residual_weak_pairing(z, w, s) == doctest::Approx(-0.3 * inner(s.f, w)));
  const EnergySetting s0 = flagship(32, 0.0);
  CHECK(residual_strong(z, s0).max_abs() == 0.0);
  CHECK(residual_weak_pairing(z, w, s0) == 0.0);
}

TEST_CASE("residual pairings match central differences") {
  std::mt19937_64 rng(42);
  for (Form form : {Form::Strong, Form::Weak}) {
    const EnergySetting s = flagship(64, 0.05, form);
    for (int t = 0; t < 5; ++t) {
      const ScalarField u = random_smooth_field(s.f.domain(), 2, rng);
      const ScalarField w = random_smooth_field(s.f.domain(), 2, rng);
      const double pairing = form == Form::Strong ? inner(residual_strong(u, s), w) : residual_weak_pairing(u, w, s);
      CHECK(pairing == doctest::Approx(fd_directional(u, w, s)).epsilon(1e-4));
    }
  }
}

TEST_CASE("three-dimensional and odd-order gradients") {
  std::mt19937_64 rng(9);
  const BoxDomain d = BoxDomain::cube(3, 12);
  const ScalarField f = sample(d, 3, [](const Point& x) { return x[0] - 0.3; });
  for (int k : {2, 3}) {
    for (Form form : {Form::Strong, Form::Weak}) {
      const EnergySetting s = make_setting({3, k}, -0.2, f, form);
      const ScalarField u = random_smooth_field(d, s.alpha, rng);
      const ScalarField w = random_smooth_field(d, s.alpha, rng);
      CHECK(inner(energy_gradient(u, s), w) == doctest::Approx(fd_directional(u, w, s)).epsilon(1e-6));
    }
  }
}

TEST_CASE("collocated residual agrees with the variational residual to second order") {
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const EnergySetting s = flagship(n, 0.05);
    const ScalarField u = sample(s.f.domain(), 2, [](const Point& x) {
      return std::pow(std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]), 3);
    });
    err.push_back(l2_norm(residual_collocated(u, s) - residual_strong(u, s)));
  }
  CHECK(err[0] / err[1] > 3.5);
  CHECK(err[1] / err[2] > 3.5);
}

TEST_CASE("weak and strong energies agree under refinement") {
  // Frozen from a refinement study of the standard bump at lambda = 0.
  std::vector<double> diff, h;
  for (int n : {32, 64, 128}) {
    const EnergySetting s = flagship(n, 0.0);
    const ScalarField u = standard_bump(s.f.domain(), 2);
    diff.push_back(evaluate_J(u, s) - evaluate_J_weak(u, s));
    h.push_back(s.f.domain().spacing(0));
  }
  CHECK(diff[0] == doctest::Approx(-1.4415e-02).epsilon(1e-3));
  CHECK(observed_order(diff[0], diff[1], h[0], h[1]) >= 1.5);
  CHECK(observed_order(diff[1], diff[2], h[1], h[2]) >= 1.5);
}

TEST_CASE("nonlinear term is homogeneous of degree k + 1") {
  const EnergySetting s = flagship(32, 0.0);
  const ScalarField u = standard_bump(s.f.domain(), 2);
  for (Form form : {Form::Strong, Form::Weak}) {
    EnergySetting sf = s;
    sf.form = form;
    const double a = nonlinear_energy(0.1 * u, sf), b = nonlinear_energy(10.0 * u, sf);
    CHECK(std::log(b / a) / std::log(100.0) == doctest::Approx(3.0).epsilon(0.01));
  }
}

TEST_CASE("J along the bump ray: quadratic near zero, negative far out") {
  const EnergySetting s = flagship(64, 0.0);
  const GeometryWitnesses g = geometry_witnesses(s);
  const double j1 = evaluate_J(1e-3 * g.psi, s), j2 = evaluate_J(1e-1 * g.psi, s);
  CHECK(j1 > 0.0);
  CHECK(std::log(j2 / j1) / std::log(100.0) == doctest::Approx(2.0).epsilon(0.01));
  // Doubling scan from t = 1: first negative value at t = 128 on this grid.
  double t = 1.0;
  while (evaluate_J(t * g.psi, s) >= 0.0) t *= 2.0;
  CHECK(t == 128.0);
  CHECK(evaluate_J(64.0 * g.psi, s) > 0.0);
}

TEST_CASE("energy is invariant under swapping the axes for even k") {
  std::mt19937_64 rng(3);
  const EnergySetting s = flagship(32, 0.0);
  const BoxDomain& d = s.f.domain();
  const ScalarField u = random_smooth_field(d, 2, rng);
  ScalarField swapped(d, 2);
  for_each_node(d, [&](const Index& idx, std::size_t f) { swapped[d.flat({idx[1], idx[0], 0})] = u[f]; });
  CHECK(evaluate_J(swapped, s) == doctest::Approx(evaluate_J(u, s)).epsilon(1e-12));
  CHECK(evaluate_J_weak(swapped, s) == doctest::Approx(evaluate_J_weak(u, s)).epsilon(1e-12));
}

TEST_CASE("energy report terms add up") {
  std::mt19937_64 rng(4);
  const EnergySetting s = flagship(32, 0.2);
  const ScalarField u = random_smooth_field(s.f.domain(), 2, rng);
  const EnergyReport r = energy_report(u, s);
  CHECK(r.J == doctest::Approx(r.quadratic_term + r.datum_term + r.nonlinear_term));
  CHECK(r.J == doctest::Approx(evaluate_J(u, s)));
  CHECK(r.seminorm == doctest::Approx(seminorm(u, 2)));
  CHECK(r.quadratic_term == doctest::Approx(0.5 * r.seminorm * r.seminorm));
}

TEST_CASE("cutoff and truncated functional") {
  const CutoffSpec c{1.0, 3.0};
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(validate(CutoffSpec{2.0, 1.0}), DomainError);
  double prev = 1.0;
  for (double R = 0.0; R < 4.0; R += 0.01) {
    const double p = c.profile(R);
    CHECK(p <= prev);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK(c.profile(1.0) == 1.0);
  CHECK(c.profile(3.0) == 0.0);
  CHECK(c.derivative(2.0) == doctest::Approx((c.profile(2.0 + 1e-6) - c.profile(2.0 - 1e-6)) / 2e-6));

  std::mt19937_64 rng(5);
  const EnergySetting s = flagship(32, 0.05);
  ScalarField u = random_smooth_field(s.f.domain(), 2, rng);
  const double R = seminorm(u, 2);
  const CutoffSpec wide{2 * R, 4 * R};
  CHECK(evaluate_H(u, s, wide) == evaluate_J(u, s));
  const CutoffSpec narrow{0.2 * R, 0.5 * R};
  CHECK(evaluate_H(u, s, narrow) == doctest::Approx(evaluate_J(u, s) - nonlinear_energy(u, s)));

  const CutoffSpec mid{0.5 * R, 1.5 * R};
  const ScalarField w = random_smooth_field(s.f.domain(), 2, rng);
  const double eps = 1e-6;
  const double fd = (evaluate_H(u + eps * w, s, mid) - evaluate_H(u - eps * w, s, mid)) / (2 * eps);
  CHECK(inner(gradient_H(u, s, mid), w) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("radial minorant and its radii") {
  CHECK(radial_minorant(0.0, {0.3, 0.2, 2}) == 0.0);
  CHECK(radial_minorant(1.7, {0.0, 0.0, 2}) == doctest::Approx(0.5 * 1.7 * 1.7));
  const MinorantRadii r = minorant_radii({0.01, 0.1, 2});
  const CubicMinorant ref = cubic_minorant(0.01, 0.1);
  CHECK(r.R0 == doctest::Approx(ref.lower).epsilon(1e-9));
  CHECK(r.R2 == doctest::Approx(ref.upper).epsilon(1e-9));
  CHECK(r.RM == doctest::Approx(ref.peak_at).epsilon(1e-9));
  CHECK(r.R1 == doctest::Approx(0.5 * (r.R0 + r.RM)));
  CHECK(r.peak == doctest::Approx(radial_minorant(ref.peak_at, {0.01, 0.1, 2})));
  CHECK(r.R0 < r.R1);
  CHECK(r.R1 < r.RM);
  CHECK(r.RM < r.R2);

  const MinorantRadii z = minorant_radii({0.0, 0.1, 2});
  CHECK(z.R0 == doctest::Approx(0.5 * z.RM));
  CHECK_THROWS_AS(minorant_radii({10.0, 10.0, 2}), GeometryError);
}

TEST_CASE("fit_minorant") {
  const EnergySetting s0 = flagship(32, 0.0);
  const MinorantFit f0 = fit_minorant(s0, 20, 1);
  CHECK(f0.coefficients.C1 == 0.0);
  CHECK(f0.coefficients.C2 > 0.0);
  CHECK(f0.verification_margin >= -1e-12);

  const MinorantFit a = fit_minorant(flagship(32, 0.05), 20, 1);
  const MinorantFit b = fit_minorant(flagship(32, 0.10), 20, 1);
  CHECK(b.coefficients.C1 == doctest::Approx(2 * a.coefficients.C1).epsilon(1e-10));
  CHECK(a.verification_margin >= -1e-12);
  CHECK(a.coefficients.C2 >= kMinorantSafety * a.best_ratio * (1 - 1e-12));

  const MinorantFit again = fit_minorant(flagship(32, 0.05), 20, 1);
  CHECK(again.coefficients.C2 == a.coefficients.C2);
  CHECK_THROWS_AS(fit_minorant(s0, 5, 1), DomainError);
}

TEST_CASE("geometry witnesses") {
  SUBCASE("N = 2, k = 2 needs the flipped bump") {
    const GeometryWitnesses g = geometry_witnesses(flagship(128, 0.05));
    CHECK(g.psi_check > 0.0);
    CHECK(g.psi_flipped);
    CHECK(g.phi_check > 0.0);
    CHECK_FALSE(g.phi_trivial);
  }
  SUBCASE("N = 3, k = 3 keeps the sign rule") {
    const BoxDomain d = BoxDomain::cube(3, 16);
    const EnergySetting s = make_setting({3, 3}, -0.05, sample(d, 3, [](const Point&) { return 1.0; }), Form::Strong);
    const GeometryWitnesses g = geometry_witnesses(s);
    CHECK(g.psi_check > 0.0);
    CHECK_FALSE(g.psi_flipped);
    CHECK(g.phi_check > 0.0);
    CHECK(inner(s.f, g.phi) < 0.0);
  }
  SUBCASE("lambda = 0 gives a trivial phi") {
    const GeometryWitnesses g = geometry_witnesses(flagship(32, 0.0));
    CHECK(g.phi_trivial);
    CHECK(g.phi.max_abs() == 0.0);
  }
}

TEST_CASE("lambda = 0: small multiples of sample fields have nonnegative energy") {
  std::mt19937_64 rng(6);
  const EnergySetting s = flagship(32, 0.0);
  for (int t = 0; t < 10; ++t) {
    const ScalarField u = t % 2 ? random_smooth_field(s.f.domain(), 2, rng) : random_bump(s.f.domain(), 2, rng);
    for (double scale : {1e-3, 1e-2, 1e-1}) CHECK(evaluate_J(scale * u, s) >= 0.0);
  }
}
