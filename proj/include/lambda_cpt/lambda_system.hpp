#pragma once

#include "lambda_cpt/common.hpp"

namespace lambda_cpt {

/// Driven Λ-scheme {|↑>, |↓>} ↔ |−>. Rabi frequencies and detunings are linear (MHz).
struct LambdaConfig {
  double omega_1 = 0.0;  // |↑> ↔ |−>
  double omega_2 = 0.0;  // |↓> ↔ |−>
  double delta_1 = 0.0;
  double delta_2 = 0.0;
  double psi = 0.0;    // relative MW phase
  double theta = 0.0;  // nuclear mixing angle of the m_s = -1 manifold
  double phi = 0.0;    // hyperfine phase

  double two_photon_detuning() const { return delta_1 - delta_2; }
  double effective_rabi() const;
};

void validate(const LambdaConfig& cfg);

/// Rabi pair with √(Ω1²+Ω2²) set by the bright-transition pulse area over `duration`,
/// split by ratio r = Ω1/Ω2 (r = +inf drives branch 1 only).
LambdaConfig with_pulse_area(LambdaConfig cfg, double pulse_area, double duration, double ratio);

struct LambdaBasis {
  Spinor dark;
  Spinor bright;
  Spinor excited;  // nuclear part of |−>
};

LambdaBasis dark_bright_basis(const LambdaConfig& cfg);

double polarization_efficiency(const LambdaConfig& cfg);

/// Phase difference φ − ψ that yields the requested α_p; throws when out of reach.
double phase_difference_for_efficiency(double theta, double ratio, double alpha_p);

struct BranchingRates {
  double gamma = 0.0;    // optical polarization rate
  double gamma_d = 0.0;  // |−> → |D>
  double gamma_b = 0.0;  // |−> → |B>
  double alpha_p = 0.0;
};

BranchingRates branching_rates(double gamma, double alpha_p);
BranchingRates branching_rates(double gamma, const LambdaConfig& cfg);

double dark_precession_overlap(double t, const LambdaConfig& cfg);

}  // namespace lambda_cpt
