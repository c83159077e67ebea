#pragma once

#include <limits>
#include <vector>

#include "lambda_cpt/density_matrix.hpp"
#include "lambda_cpt/lambda_system.hpp"

namespace lambda_cpt {

enum class Integrator { exact, rk4 };

inline constexpr double default_dt = 1e-3;  // µs

/// Full RWA generator of the Λ-system in rad/µs, basis (|↑>, |↓>, |−>).
Matrix3c rwa_generator(const LambdaConfig& cfg);

/// Rotating-frame part only (detunings, no drive). Acts during waits and laser pulses.
Matrix3c frame_generator(const LambdaConfig& cfg);

// Segment maps. Each one is a superoperator so sequences can reuse them across repetitions.

Superoperator pulse_map(const LambdaConfig& cfg, double duration, double dt = default_dt,
                        Integrator integrator = Integrator::exact);

/// Optical pumping: |−> decays to |D> at Γ_D and to |B> at Γ_B, plus ↑↓ dephasing at gamma_dp.
Superoperator laser_map(const LambdaConfig& cfg, const BranchingRates& relax, double gamma_dp,
                        double duration, double dt = default_dt);

/// Free evolution in the dark: ↑↓ dephasing at gamma_2n, electron T1 toward a uniform mixture.
Superoperator wait_map(const LambdaConfig& cfg, double duration, double gamma_2n, double t1_e,
                       double dt = default_dt);

DensityMatrix evolve_pulse(const DensityMatrix& rho, const LambdaConfig& cfg, double duration,
                           double dt = default_dt, Integrator integrator = Integrator::exact);

DensityMatrix apply_laser(const DensityMatrix& rho, const LambdaConfig& cfg, const BranchingRates& relax,
                          double gamma_dp, double duration, double dt = default_dt);

DensityMatrix apply_wait(const DensityMatrix& rho, const LambdaConfig& cfg, double duration, double gamma_2n,
                         double t1_e = std::numeric_limits<double>::infinity(), double dt = default_dt);

struct SequenceConfig {
  double t_mw = 6.0;
  double t_wait_pre = 0.1;
  double t_laser = 0.3;
  double t_wait_post = 1.0;
  double t_seq = 7.4;  // any excess over the packed duration extends the pre-laser wait
  int n_reps = 40;
  LambdaConfig lambda;
  BranchingRates relax;
  double gamma_dp = 0.0;
  double gamma_2n = 0.0;
  double t1_e = std::numeric_limits<double>::infinity();
  double dt = default_dt;
  Integrator integrator = Integrator::exact;

  double packed_duration() const { return t_mw + t_wait_pre + t_laser + t_wait_post; }
  double effective_wait_pre() const { return t_seq - t_mw - t_laser - t_wait_post; }
};

void validate(const SequenceConfig& seq);

/// Balanced Ω1 = Ω2 π-pulses, Γ = 20/µs, θ = 1.14 rad and the MW phase chosen so α_p = 0.43,
/// Γ_dp chosen so the per-step depolarization is 0.12.
SequenceConfig reference_sequence();

/// Γ_dp that yields a per-step depolarization probability 1 − exp(−Γ_dp·ΔT).
double dephasing_rate_for(double alpha_dp, double t_laser);

struct StepRecord {
  int step = 0;  // 1-based; populations at the start of this step's laser pulse
  double p_dark = 0.0;
  double p_bright = 0.0;
  double p_excited = 0.0;
  double p_up = 0.0;
  double p_down = 0.0;
};

struct StepTrace {
  std::vector<StepRecord> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  std::vector<double> excited() const;
};

struct SequenceResult {
  StepTrace trace;
  DensityMatrix final_state;
};

SequenceResult run_cpt_sequence(const DensityMatrix& rho0, const SequenceConfig& seq);

}  // namespace lambda_cpt
