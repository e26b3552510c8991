#include "polyhess/exponents.hpp"

#include "polyhess/errors.hpp"

namespace polyhess {

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::int64_t ceil_rational(const Rational& r) {
  // boost::rational keeps the denominator positive.
  const std::int64_t n = r.numerator();
  const std::int64_t d = r.denominator();
  std::int64_t q = n / d;
  if (n % d != 0 && n > 0) ++q;
  return q;
}

void validate(const ProblemParams& p) {
  if (p.N < 2) throw DomainError("N must be >= 2, got " + std::to_string(p.N));
  if (p.k < 2 || p.k > p.N) {
    throw DomainError("k must satisfy 2 <= k <= N (N=" + std::to_string(p.N) +
                      ", k=" + std::to_string(p.k) + ")");
  }
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Super:
      return "SUPER";
    case Regime::Sub:
      return "SUB";
    case Regime::Critical:
      return "CRITICAL";
  }
  return "?";
}

Regime classify_regime(const ProblemParams& p) {
  validate(p);
  if (2 * p.k > p.N) return Regime::Super;
  if (2 * p.k == p.N) return Regime::Critical;
  return Regime::Sub;
}

int alpha_main(const ProblemParams& p) {
  const std::int64_t N = p.N;
  const std::int64_t k = p.k;
  switch (classify_regime(p)) {
    case Regime::Super:
      // ceil(2 + (k-2) N / (2k))
      return static_cast<int>(ceil_rational(Rational(2) + Rational((k - 2) * N, 2 * k)));
    case Regime::Sub:
      return alpha_weak(p);
    case Regime::Critical:
      return static_cast<int>(N / 2);
  }
  return 0;
}

int alpha_weak(const ProblemParams& p) {
  validate(p);
  const std::int64_t N = p.N;
  const std::int64_t k = p.k;
  return static_cast<int>(ceil_rational(Rational(N * k - N + 4 * k, 2 * k + 2)));
}

int alpha_summable(const ProblemParams& p) {
  validate(p);
  const std::int64_t N = p.N;
  if (p.k <= (2 * N) / 3) return static_cast<int>(ceil_rational(Rational(N + 1, 2)));
  return static_cast<int>(ceil_rational(Rational(N + 2, 2)));
}

LebesgueExponents lebesgue_exponents(const ProblemParams& p) {
  validate(p);
  const std::int64_t N = p.N;
  const std::int64_t k = p.k;
  LebesgueExponents e;
  e.p_star = Rational(N * (k + 1), k * (N + 2));
  if (2 * k < N) e.q_star = Rational(N * (k + 1), N - 2 * k);
  e.p_tilde = Rational(N * (k + 1), (N + 2) * (k - 1));
  e.q_tilde = Rational(N * (k + 1), N - k + 1);
  return e;
}

RegimeReport regime_report(const ProblemParams& p) {
  RegimeReport r;
  r.params = p;
  r.regime = classify_regime(p);
  r.alpha_main = alpha_main(p);
  r.alpha_weak = alpha_weak(p);
  r.alpha_summable = alpha_summable(p);
  r.exponents = lebesgue_exponents(p);
  switch (r.regime) {
    case Regime::Super:
      r.datum_space_label = "L1";
      break;
    case Regime::Sub:
      r.datum_space_label = "Lp*";
      break;
    case Regime::Critical:
      r.datum_space_label = "h1_r (treated numerically as L1)";
      break;
  }
  return r;
}

}  // namespace polyhess
