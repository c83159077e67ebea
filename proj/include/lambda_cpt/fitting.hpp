#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lambda_cpt/experiments.hpp"

namespace lambda_cpt {

/// y = baseline − Σ amplitude·exp(−(x − center)²/(2σ²)), FWHM = 2√(2 ln 2)·σ.
struct DipFit {
  std::vector<double> centers;
  std::vector<double> fwhms;
  std::vector<double> amplitudes;
  std::vector<double> center_errors;  // 1σ from the Jacobian at the optimum
  std::vector<double> fwhm_errors;
  double baseline = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool no_dip = false;
};

struct DipFitOptions {
  std::vector<double> init_centers;  // empty: local minima below baseline − 3·noise
  int max_iterations = 500;
  double ftol = 1e-10;
};

DipFit fit_dips(std::span<const double> x, std::span<const double> y, int k, const DipFitOptions& options = {});
DipFit fit_dips(const Spectrum& spec, int k, const DipFitOptions& options = {});

double gaussian_dips(double x, double baseline, std::span<const double> centers, std::span<const double> fwhms,
                     std::span<const double> amplitudes);

inline constexpr double fwhm_per_sigma = 2.3548200450309493;  // 2√(2 ln 2)

/// P(N) = p_inf − (p_inf − p0)·e^{−N/N_s}.
struct SaturationFit {
  double n_s = 0.0;
  double p_inf = 0.0;
  double p0 = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool identifiable = true;

  double predict(double n) const;
};

SaturationFit fit_saturation(std::span<const double> steps, std::span<const double> p_dark, int max_iterations = 500);
/// Fits the recorded dark population; step N of the trace holds P_D(N−1).
SaturationFit fit_saturation(const StepTrace& trace);
/// Fits the calibrated estimate P_D(k), k = 0 … n−1.
SaturationFit fit_saturation(const PumpTrace& trace);

/// Least-squares a in f(r) = 0.5 + a·(r²/(1+r²) − 0.5).
double fit_contrast_curve(std::span<const std::pair<double, double>> points);
double contrast_model(double ratio, double a);

}  // namespace lambda_cpt
