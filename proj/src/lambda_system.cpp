#include "lambda_cpt/lambda_system.hpp"

#include <cmath>
#include <limits>

namespace lambda_cpt {

double LambdaConfig::effective_rabi() const { return std::hypot(omega_1, omega_2); }

void validate(const LambdaConfig& cfg) {
  if (!(cfg.omega_1 >= 0.0)) throw InvalidArgument("lambda.omega_1 must be non-negative");
  if (!(cfg.omega_2 >= 0.0)) throw InvalidArgument("lambda.omega_2 must be non-negative");
  if (!(cfg.effective_rabi() > 0.0))
    throw InvalidArgument("lambda: omega_1 and omega_2 cannot both vanish");
  if (!std::isfinite(cfg.delta_1) || !std::isfinite(cfg.delta_2) || !std::isfinite(cfg.psi) ||
      !std::isfinite(cfg.theta) || !std::isfinite(cfg.phi))
    throw InvalidArgument("lambda: detunings and phases must be finite");
}

LambdaConfig with_pulse_area(LambdaConfig cfg, double pulse_area, double duration, double ratio) {
  if (!(duration > 0.0)) throw InvalidArgument("pulse duration must be positive");
  if (!(ratio >= 0.0)) throw InvalidArgument("Rabi ratio must be non-negative");
  const double omega = pulse_area / (two_pi * duration);
  if (std::isinf(ratio)) {
    cfg.omega_1 = omega;
    cfg.omega_2 = 0.0;
  } else {
    const double norm = std::hypot(ratio, 1.0);
    cfg.omega_1 = omega * ratio / norm;
    cfg.omega_2 = omega / norm;
  }
  return cfg;
}

LambdaBasis dark_bright_basis(const LambdaConfig& cfg) {
  validate(cfg);
  const double norm = cfg.effective_rabi();
  const double w1 = cfg.omega_1 / norm;
  const double w2 = cfg.omega_2 / norm;
  const cplx phase = std::exp(-I * cfg.psi);
  LambdaBasis basis;
  // |↓> coefficient of |D> is real and negative.
  basis.dark = Spinor(w2 * phase, -w1);
  basis.bright = Spinor(w1, w2 * std::conj(phase));
  basis.excited = Spinor(-std::sin(cfg.theta / 2) * std::exp(-I * cfg.phi), std::cos(cfg.theta / 2));
  return basis;
}

double polarization_efficiency(const LambdaConfig& cfg) {
  validate(cfg);
  const double s2 = std::pow(std::sin(cfg.theta / 2), 2);
  const double c2 = std::pow(std::cos(cfg.theta / 2), 2);
  // Written in (Ω1, Ω2) rather than r = Ω1/Ω2 so Ω2 = 0 needs no special case.
  const double o1 = cfg.omega_1;
  const double o2 = cfg.omega_2;
  const double num = o2 * o2 * s2 + o1 * o1 * c2 + o1 * o2 * std::sin(cfg.theta) * std::cos(cfg.phi - cfg.psi);
  return num / (o1 * o1 + o2 * o2);
}

double phase_difference_for_efficiency(double theta, double ratio, double alpha_p) {
  const double s2 = std::pow(std::sin(theta / 2), 2);
  const double c2 = std::pow(std::cos(theta / 2), 2);
  const double cross = ratio * std::sin(theta);
  if (cross == 0.0) throw InvalidArgument("alpha_p does not depend on the phase for this theta/ratio");
  const double cosine = (alpha_p * (1 + ratio * ratio) - s2 - ratio * ratio * c2) / cross;
  if (std::abs(cosine) > 1.0) throw InvalidArgument("requested alpha_p is out of reach for this theta/ratio");
  return std::acos(cosine);
}

BranchingRates branching_rates(double gamma, double alpha_p) {
  if (!(gamma > 0.0)) throw InvalidArgument("laser.gamma must be positive");
  if (!(alpha_p >= 0.0 && alpha_p <= 1.0)) throw InvalidArgument("laser.alpha_p must lie in [0, 1]");
  return {gamma, gamma * alpha_p, gamma * (1.0 - alpha_p), alpha_p};
}

BranchingRates branching_rates(double gamma, const LambdaConfig& cfg) {
  return branching_rates(gamma, polarization_efficiency(cfg));
}

double dark_precession_overlap(double t, const LambdaConfig& cfg) {
  const auto basis = dark_bright_basis(cfg);
  Spinor evolved = basis.dark;
  evolved(1) *= std::exp(I * two_pi * cfg.two_photon_detuning() * t);
  return std::norm(basis.dark.dot(evolved));
}

}  // namespace lambda_cpt
