#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lambda_cpt/density_matrix.hpp"

namespace lambda_cpt {

/// Spin-dependent PL: m_s = 0 shines at reference_0, m_s = −1 at reference_0·(1 − contrast).
struct ReadoutModel {
  double contrast = 0.3;
  double reference_0 = 1.0;
  double noise_sigma = 0.0;  // additive Gaussian, off by default

  double reference_1() const { return reference_0 * (1.0 - contrast); }
};

void validate(const ReadoutModel& model);

double readout_signal(double p_excited, const ReadoutModel& model);
double readout_signal(const DensityMatrix& rho, const ReadoutModel& model);

/// Recovers P_− from a signal; throws for a zero-contrast model.
double invert_signal(double signal, const ReadoutModel& model);
std::vector<double> invert_calibration(std::span<const double> signals, const ReadoutModel& model);

/// Calibrated dark population P_D(N−1) = 1 − P_−(N)/(2·P_−(1)), one value per entry of p_excited.
std::vector<double> extract_dark_population(std::span<const double> p_excited, double min_first = 0.0);

/// Adds seeded Gaussian noise of model.noise_sigma to each signal (no-op when sigma is 0).
void add_shot_noise(std::span<double> signals, const ReadoutModel& model, std::uint64_t seed);

}  // namespace lambda_cpt
