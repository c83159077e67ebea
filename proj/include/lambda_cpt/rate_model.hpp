#pragma once

#include "lambda_cpt/common.hpp"

namespace lambda_cpt {

/// One pumping step: MW pulse of area A followed by a laser pulse of length ΔT.
struct PumpStepParams {
  double alpha_p = 0.0;
  double pulse_area = pi;
  double gamma = 20.0;
  double gamma_dp = 0.0;
  double delta_t = 0.3;
};

void validate(const PumpStepParams& p);

/// Affine step P_D(N) = a·P_D(N−1) + b.
struct StepMap {
  double a = 0.0;
  double b = 0.0;

  double apply(double p) const { return a * p + b; }
};

StepMap step_map(const PumpStepParams& p);

/// Dark population during the laser pulse, t measured from its start (electron assumed re-polarized).
double laser_dark_population(const PumpStepParams& p, double p_dark_before, double t);

double population_after_n(double a, double b, double p0, int n);
inline double population_after_n(const StepMap& m, double p0, int n) { return population_after_n(m.a, m.b, p0, n); }

/// α_p′ = α_p·sin²(A/2) and per-step depolarization probability α_dp.
struct SimplifiedParams {
  double alpha_p_eff = 0.0;
  double alpha_dp = 0.0;
};

void validate(const SimplifiedParams& p);

StepMap simplified_step_map(const SimplifiedParams& p);
double characteristic_steps(const SimplifiedParams& p);
double steady_state(const SimplifiedParams& p);
double simplified_population(const SimplifiedParams& p, double p0, int n);

/// Maps a full step onto (α_p′, α_dp): α_dp = 1 − e^{−Γ_dp ΔT}, α_p′ from a = (1−α_p′)(1−α_dp).
SimplifiedParams simplified_from_step(const PumpStepParams& p);

/// Inverse of (N_s, P∞) → (α_p′, α_dp).
SimplifiedParams simplified_from_fit(double n_s, double p_inf);

}  // namespace lambda_cpt
