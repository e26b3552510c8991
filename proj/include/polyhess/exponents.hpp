#pragma once

// Regularity exponents and regime classification for
//
//     (-1)^alpha Lap^alpha u = (-1)^k S_k[u] + lambda f   in a domain of R^N,
//
// computed in exact rational arithmetic.

#include <cstdint>
#include <optional>
#include <string>

#include <boost/rational.hpp>

namespace polyhess {

using Rational = boost::rational<std::int64_t>;

/// "num/den" rendering (denominator always printed).
std::string to_string(const Rational& r);
/// Smallest integer >= r.
std::int64_t ceil_rational(const Rational& r);

struct ProblemParams {
  int N = 2;
  int k = 2;
};

/// Throws DomainError unless N >= 2 and 2 <= k <= N.
void validate(const ProblemParams& p);

enum class Regime {
  Super,     // N/2 < k <= N
  Sub,       // 2 <= k < N/2
  Critical,  // k = N/2
};

std::string to_string(Regime r);

Regime classify_regime(const ProblemParams& p);

/// Regime-dependent alpha for the strong problem.
int alpha_main(const ProblemParams& p);
/// ceil((Nk - N + 4k) / (2k + 2)), the single alpha for the divergence-form problem.
int alpha_weak(const ProblemParams& p);
/// alpha for data that are merely summable, independent of the regime.
int alpha_summable(const ProblemParams& p);

struct LebesgueExponents {
  Rational p_star;
  std::optional<Rational> q_star;  // only when 2k < N
  Rational p_tilde;
  Rational q_tilde;
};

LebesgueExponents lebesgue_exponents(const ProblemParams& p);

struct RegimeReport {
  ProblemParams params;
  Regime regime = Regime::Super;
  int alpha_main = 0;
  int alpha_weak = 0;
  int alpha_summable = 0;
  LebesgueExponents exponents;
  std::string datum_space_label;
};

RegimeReport regime_report(const ProblemParams& p);

}  // namespace polyhess
