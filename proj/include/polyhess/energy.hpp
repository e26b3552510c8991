#pragma once

// Discrete energy of
//
//     (-1)^alpha Lap^alpha u = (-1)^k S_k[u] + lambda f,   clamped on the box,
//
// in two flavours:
//   strong:  J = int  1/2 |half_order(u)|^2 - lambda f u - (-1)^k/(k+1) u S_k[u]
//   weak:    J = int  1/2 |half_order(u)|^2 - lambda f u + (-1)^k/((k+1)k) sum_ij u_i u_j S^ij[u]
//
// Every gradient returned here is the exact derivative of the matching discrete
// energy, divided by the cell volume so it reads as an L2 field:
//   integrate(gradient * w) == d/de energy(u + e w) at e = 0   (to roundoff).
// residual_collocated() is the pointwise PDE residual instead; it agrees with
// residual_strong() to O(h^2).

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "polyhess/exponents.hpp"
#include "polyhess/grid.hpp"
#include "polyhess/riesz.hpp"

namespace polyhess {

enum class Form { Strong, Weak };

std::string to_string(Form f);
Form parse_form(const std::string& s);  // "strong" | "weak", throws ConfigError

struct EnergySetting {
  ProblemParams params;
  int alpha = 2;
  bool alpha_overridden = false;
  double lambda = 0.0;
  ScalarField f;
  Form form = Form::Strong;
};

/// alpha defaults to alpha_main (strong) or alpha_weak (weak) unless overridden.
EnergySetting make_setting(const ProblemParams& params, double lambda, ScalarField f, Form form,
                           std::optional<int> alpha_override = std::nullopt);
/// Throws CapabilityError for N > 3, DomainError for inconsistent N / alpha / grid.
void validate(const EnergySetting& s);

struct EnergyReport {
  double J = 0.0;
  double quadratic_term = 0.0;
  double datum_term = 0.0;
  double nonlinear_term = 0.0;
  double seminorm = 0.0;
  Form form = Form::Strong;
};

/// Term-by-term evaluation using the energy of s.form.
EnergyReport energy_report(const ScalarField& u, const EnergySetting& s);

double evaluate_J(const ScalarField& u, const EnergySetting& s);
double evaluate_J_weak(const ScalarField& u, const EnergySetting& s);
/// evaluate_J or evaluate_J_weak according to s.form.
double evaluate_energy(const ScalarField& u, const EnergySetting& s);

/// Exact L2 gradient of evaluate_J.
ScalarField residual_strong(const ScalarField& u, const EnergySetting& s);
/// (-1)^alpha Lap^alpha u - (-1)^k S_k[u] - lambda f, pointwise.
ScalarField residual_collocated(const ScalarField& u, const EnergySetting& s);
/// Exact L2 gradient of evaluate_J_weak (its Riesz representative on the nodal basis).
ScalarField residual_weak(const ScalarField& u, const EnergySetting& s);
/// integrate(residual_weak(u) * w)
double residual_weak_pairing(const ScalarField& u, const ScalarField& w, const EnergySetting& s);
/// residual_strong or residual_weak according to s.form.
ScalarField energy_gradient(const ScalarField& u, const EnergySetting& s);

/// Nonlinear term alone (of s.form) and its L2 gradient.
double nonlinear_energy(const ScalarField& u, const EnergySetting& s);
ScalarField nonlinear_gradient(const ScalarField& u, const EnergySetting& s);

// --- truncation ------------------------------------------------------------

/// Quintic smoothstep cutoff: 1 on [0, R0], 0 on [R1, inf).
struct CutoffSpec {
  double R0 = 0.0;
  double R1 = 0.0;

  double profile(double R) const;
  double derivative(double R) const;
};

void validate(const CutoffSpec& c);

/// Quadratic and datum terms of s.form, plus profile(seminorm) times the nonlinear term.
double evaluate_H(const ScalarField& u, const EnergySetting& s, const CutoffSpec& c);
ScalarField gradient_H(const ScalarField& u, const EnergySetting& s, const CutoffSpec& c);

// --- mountain-pass geometry ------------------------------------------------

struct MinorantCoefficients {
  double C1 = 0.0;
  double C2 = 0.0;
  int k = 2;
};

/// 1/2 R^2 - C1 R - C2 R^(k+1)
double radial_minorant(double R, const MinorantCoefficients& m);

struct MinorantRadii {
  double R0 = 0.0;  // lower positive root (or R_M / 2 when C1 = 0)
  double R1 = 0.0;  // midpoint of [R0, R_M]
  double RM = 0.0;  // maximiser
  double R2 = 0.0;  // upper positive root
  double peak = 0.0;
};

/// Throws GeometryError when the minorant never becomes positive.
MinorantRadii minorant_radii(const MinorantCoefficients& m);

struct MinorantFit {
  MinorantCoefficients coefficients;
  int samples = 0;
  double best_ratio = 0.0;           // largest nonlinear ratio seen before the safety factor
  double verification_margin = 0.0;  // min over fresh samples of (J - h(R)) / scale
  int verification_samples = 0;
};

/// Safety factor applied to the sampled supremum of the nonlinear ratio.
inline constexpr double kMinorantSafety = 1.1;

/// C1 is exact (|lambda| times the dual seminorm of f); C2 is sampled.
MinorantFit fit_minorant(const EnergySetting& s, int samples, std::uint64_t seed,
                         const PolyharmonicSolver& riesz);
MinorantFit fit_minorant(const EnergySetting& s, int samples, std::uint64_t seed);

struct GeometryWitnesses {
  ScalarField phi;
  ScalarField psi;
  bool phi_trivial = false;      // lambda == 0
  double phi_check = 0.0;        // lambda * integrate(f * phi)
  double psi_check = 0.0;        // (-1)^k integrate(psi * S_k[psi])
  double mollifier_width = 0.0;  // Gaussian standard deviation used for phi
  bool psi_flipped = false;      // true when the bump had to be negated to make psi_check > 0
};

GeometryWitnesses geometry_witnesses(const EnergySetting& s);

// --- sample fields ---------------------------------------------------------

/// Positive bump of unit amplitude with random centre and radius, strictly inside the box.
ScalarField random_bump(const BoxDomain& d, int ghost_width, std::mt19937_64& rng);
/// Low-mode trigonometric sum times a boundary window, scaled to unit max norm.
ScalarField random_smooth_field(const BoxDomain& d, int ghost_width, std::mt19937_64& rng);
/// Separable Gaussian smoothing with standard deviation `width`, zero-extended.
ScalarField gaussian_smooth(const ScalarField& u, double width);

}  // namespace polyhess
