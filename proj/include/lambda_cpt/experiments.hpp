#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lambda_cpt/dynamics.hpp"

namespace lambda_cpt {

/// Signal vs δ2. The signal of each point is the steady-state excited population divided by
/// twice the first-step one, i.e. the calibrated bright fraction 1 − P_D.
struct Spectrum {
  std::vector<double> grid;         // δ2, MHz, strictly increasing
  std::vector<double> signal;       // normalized
  std::vector<double> raw_excited;  // mean steady-state P_−
  double delta_1 = 0.0;
  std::optional<SequenceConfig> sequence;

  std::size_t size() const { return grid.size(); }
  /// 1 − min(signal).
  double dip_contrast() const;
  /// Grid value at the minimum signal.
  double minimum_position() const;
};

std::vector<double> linear_grid(double lo, double hi, int points);

/// Number of trailing steps averaged for the steady state: max(5, n/4), at most n.
int steady_window(int n_reps);

Spectrum cpt_spectrum(const SequenceConfig& seq, double delta_1, std::span<const double> grid,
                      unsigned workers = 1);

struct PumpTrace {
  StepTrace trace;
  /// Calibrated P_D(k) for k = 0 … n−1, from the excited population of step k+1.
  std::vector<double> p_dark_estimate;
};

PumpTrace pump_trace(const SequenceConfig& seq);

struct CompositionPoint {
  double ratio = 0.0;            // Ω1/Ω2
  double alpha_p = 0.0;
  double p_dark_steady = 0.0;    // calibrated
  double p_down = 0.0;           // non-bright probability after the selective readout pulse
  double measured = 0.0;         // inferred |<↓|D>|²
  double raw_probability = 0.0;  // measured with the artificial contrast applied
  double ideal = 0.0;            // r²/(1+r²)
};

/// Steady-state dark-state composition for each Rabi ratio. The pulse area, phases and timing
/// come from seq; α_p follows from the ratio at each point.
std::vector<CompositionPoint> composition_sweep(const SequenceConfig& seq, std::span<const double> ratios,
                                                double artificial_contrast = 1.0);

std::vector<Spectrum> multi_resonance_scan(const SequenceConfig& base, std::span<const double> t_seq_list,
                                           std::span<const double> grid, unsigned workers = 1);

struct CombPrediction {
  std::vector<int> orders;
  std::vector<double> dip_centers;  // MHz
  double spacing = 0.0;             // MHz
  double dip_width = 0.0;           // MHz
  double envelope_width = 0.0;      // MHz

  /// Orders n ≥ 1 whose center lies inside half the envelope width.
  int visible_side_orders() const;
};

CombPrediction comb_predict(double t_mw, double t_seq, double n_s, int n_max);

double relaxation_linewidth(double n_s, double t1_e);
double linewidth_limit(double gamma_1, double gamma_2n_star);

}  // namespace lambda_cpt
