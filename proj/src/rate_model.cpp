#include "lambda_cpt/rate_model.hpp"

#include <cmath>

namespace lambda_cpt {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

// Effective transfer into |D> per unit bright population, (Γα_p − Γdp/2)/(Γ − Γdp).
double transfer(const PumpStepParams& p) {
  return (p.gamma * p.alpha_p - p.gamma_dp / 2.0) / (p.gamma - p.gamma_dp);
}

}  // namespace

void validate(const PumpStepParams& p) {
  require_unit(p.alpha_p, "alpha_p");
  if (!std::isfinite(p.pulse_area)) throw InvalidArgument("pulse_area must be finite");
  if (!(p.gamma_dp >= 0.0)) throw InvalidArgument("gamma_dp must be non-negative");
  if (!(p.gamma > p.gamma_dp)) throw InvalidArgument("rate model requires gamma > gamma_dp");
  if (!(p.delta_t >= 0.0)) throw InvalidArgument("delta_t must be non-negative");
}

StepMap step_map(const PumpStepParams& p) {
  validate(p);
  const double decay = std::exp(-p.gamma_dp * p.delta_t);
  const double s = std::pow(std::sin(p.pulse_area / 2.0), 2);
  const double k = transfer(p);
  return StepMap{decay * (1.0 - s * k), 0.5 * (1.0 - decay) + decay * s * k};
}

double laser_dark_population(const PumpStepParams& p, double p_dark_before, double t) {
  validate(p);
  const double s = std::pow(std::sin(p.pulse_area / 2.0), 2);
  const double p_minus0 = (1.0 - p_dark_before) * s;
  const double k = transfer(p);
  const double dp = std::exp(-p.gamma_dp * t);
  const double g = std::exp(-p.gamma * t);
  return 0.5 + (p_dark_before - 0.5) * dp + p_minus0 * k * (dp - g);
}

double population_after_n(double a, double b, double p0, int n) {
  if (n < 0) throw InvalidArgument("step count must be non-negative");
  if (n == 0) return p0;
  if (a == 1.0) return p0 + n * b;
  const double p_inf = b / (1.0 - a);
  return p_inf + std::pow(a, n) * (p0 - p_inf);
}

void validate(const SimplifiedParams& p) {
  require_unit(p.alpha_p_eff, "alpha_p_eff");
  require_unit(p.alpha_dp, "alpha_dp");
}

StepMap simplified_step_map(const SimplifiedParams& p) {
  validate(p);
  const double a = (1.0 - p.alpha_p_eff) * (1.0 - p.alpha_dp);
  return StepMap{a, p.alpha_p_eff + p.alpha_dp * (0.5 - p.alpha_p_eff)};
}

double characteristic_steps(const SimplifiedParams& p) {
  validate(p);
  const double loss = p.alpha_p_eff + p.alpha_dp * (1.0 - p.alpha_p_eff);
  if (loss == 0.0) throw InvalidArgument("alpha_p_eff = alpha_dp = 0: no relaxation, N_s undefined");
  if (loss == 1.0) return 0.0;
  return -1.0 / std::log(1.0 - loss);
}

double steady_state(const SimplifiedParams& p) {
  validate(p);
  const double loss = p.alpha_p_eff + p.alpha_dp * (1.0 - p.alpha_p_eff);
  if (loss == 0.0) throw InvalidArgument("alpha_p_eff = alpha_dp = 0: steady state undefined");
  return (p.alpha_p_eff + p.alpha_dp * (0.5 - p.alpha_p_eff)) / loss;
}

double simplified_population(const SimplifiedParams& p, double p0, int n) {
  if (n < 0) throw InvalidArgument("step count must be non-negative");
  if (n == 0) return p0;
  const double p_inf = steady_state(p);
  const double a = (1.0 - p.alpha_p_eff) * (1.0 - p.alpha_dp);
  return p_inf - (p_inf - p0) * std::pow(a, n);
}

SimplifiedParams simplified_from_step(const PumpStepParams& p) {
  const StepMap m = step_map(p);
  const double alpha_dp = 1.0 - std::exp(-p.gamma_dp * p.delta_t);
  return SimplifiedParams{1.0 - m.a / (1.0 - alpha_dp), alpha_dp};
}

SimplifiedParams simplified_from_fit(double n_s, double p_inf) {
  if (!(n_s > 0.0)) throw InvalidArgument("N_s must be positive");
  const double a = std::exp(-1.0 / n_s);
  const double b = p_inf * (1.0 - a);
  const double alpha_dp = 2.0 * (1.0 - a - b);
  if (alpha_dp >= 1.0) throw InvalidArgument("fit parameters imply alpha_dp >= 1");
  return SimplifiedParams{(b - 0.5 * alpha_dp) / (1.0 - alpha_dp), alpha_dp};
}

}  // namespace lambda_cpt
