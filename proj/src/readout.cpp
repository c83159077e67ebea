#include "lambda_cpt/readout.hpp"

#include <cmath>
#include <random>
#include <string>

namespace lambda_cpt {

void validate(const ReadoutModel& model) {
  if (!(model.contrast >= 0.0 && model.contrast <= 1.0)) throw InvalidArgument("readout.contrast must lie in [0, 1]");
  if (!(model.reference_0 > 0.0) || !std::isfinite(model.reference_0))
    throw InvalidArgument("readout.reference_0 must be positive");
  if (!(model.noise_sigma >= 0.0)) throw InvalidArgument("readout.noise_sigma must be non-negative");
}

double readout_signal(double p_excited, const ReadoutModel& model) {
  return model.reference_0 * (1.0 - model.contrast * p_excited);
}

double readout_signal(const DensityMatrix& rho, const ReadoutModel& model) {
  return readout_signal(rho.population(excited), model);
}

double invert_signal(double signal, const ReadoutModel& model) {
  validate(model);
  if (model.contrast == 0.0) throw InvalidArgument("readout contrast is zero; signal carries no population");
  return (1.0 - signal / model.reference_0) / model.contrast;
}

std::vector<double> invert_calibration(std::span<const double> signals, const ReadoutModel& model) {
  std::vector<double> out;
  out.reserve(signals.size());
  for (double s : signals) out.push_back(invert_signal(s, model));
  return out;
}

std::vector<double> extract_dark_population(std::span<const double> p_excited, double min_first) {
  if (p_excited.empty()) return {};
  const double first = p_excited.front();
  if (!(first > min_first) || first == 0.0)
    throw InvalidArgument("first-step excited population " + std::to_string(first) +
                          " too small to calibrate the dark population");
  std::vector<double> out;
  out.reserve(p_excited.size());
  for (double p : p_excited) out.push_back(1.0 - p / (2.0 * first));
  return out;
}

void add_shot_noise(std::span<double> signals, const ReadoutModel& model, std::uint64_t seed) {
  if (model.noise_sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, model.noise_sigma);
  for (double& s : signals) s += noise(rng);
}

}  // namespace lambda_cpt
