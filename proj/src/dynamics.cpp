#include "lambda_cpt/dynamics.hpp"

#include <array>
#include <cmath>
#include <string>

namespace lambda_cpt {

namespace {

void require_segment(double duration, double dt) {
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw InvalidArgument("segment duration must be finite and non-negative");
  if (!(dt > 0.0)) throw InvalidArgument("integration step dt must be positive");
}

Superoperator unitary_map(const Matrix3c& h, double duration) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(h);
  const auto& v = solver.eigenvectors();
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k) phases(k) = std::exp(-I * solver.eigenvalues()(k) * duration);
  const Matrix3c u = v * phases.asDiagonal() * v.adjoint();
  return Superoperator::conjugation(u);
}

// Fixed-step RK4 for dρ/dt = L ρ. For a constant generator one RK4 step is the matrix
// polynomial below, so n steps are its n-th power.
Superoperator rk4_map(const Superoperator& generator, double duration, double dt) {
  using M = Superoperator::Matrix;
  auto step = [&](double h) {
    const M hl = h * generator.matrix();
    const M hl2 = hl * hl;
    const M hl3 = hl2 * hl;
    return Superoperator(M(M::Identity() + hl + hl2 / 2.0 + hl3 / 6.0 + hl3 * hl / 24.0));
  };
  const auto n = static_cast<std::uint64_t>(std::floor(duration / dt + 1e-9));
  const double remainder = duration - static_cast<double>(n) * dt;
  Superoperator result = step(dt).power(n);
  if (remainder > 1e-12) result = step(remainder) * result;
  return result;
}

double max_abs(const Matrix3c& h) { return h.cwiseAbs().maxCoeff(); }

void require_dissipative_step(double rate, double dt) {
  if (dt * rate > 0.1)
    throw EngineError("integration step dt = " + std::to_string(dt) + " us too coarse for rate " +
                      std::to_string(rate) + " /us");
}

Matrix3c outer(const Vector3c& ket, const Vector3c& bra) { return ket * bra.adjoint(); }

Matrix3c nuclear_dephasing(double rate) {
  Matrix3c l = Matrix3c::Zero();
  const double amp = std::sqrt(rate / 2.0);
  l(up, up) = amp;
  l(down, down) = -amp;
  return l;
}

}  // namespace

Matrix3c rwa_generator(const LambdaConfig& cfg) {
  validate(cfg);
  Matrix3c h = frame_generator(cfg);
  const cplx phase = std::exp(I * cfg.psi);
  h(up, excited) = two_pi * cfg.omega_1 / 2;
  h(excited, up) = two_pi * cfg.omega_1 / 2;
  // Phase placement keeps (Ω2 e^{-iψ}, -Ω1, 0) an exact null vector at δ_R = 0.
  h(down, excited) = two_pi * cfg.omega_2 / 2 * phase;
  h(excited, down) = two_pi * cfg.omega_2 / 2 * std::conj(phase);
  return h;
}

Matrix3c frame_generator(const LambdaConfig& cfg) {
  Matrix3c h = Matrix3c::Zero();
  h(down, down) = -two_pi * cfg.two_photon_detuning();
  h(excited, excited) = -two_pi * cfg.delta_1;
  return h;
}

Superoperator pulse_map(const LambdaConfig& cfg, double duration, double dt, Integrator integrator) {
  require_segment(duration, dt);
  const Matrix3c h = rwa_generator(cfg);
  const double scale = max_abs(h);
  if (scale > 0.0 && dt > 0.01 / scale)
    throw EngineError("integration step dt = " + std::to_string(dt) + " us exceeds 0.01/max|H| = " +
                      std::to_string(0.01 / scale) + " us");
  if (duration == 0.0) return Superoperator::identity();
  if (integrator == Integrator::exact) return unitary_map(h, duration);
  return rk4_map(Superoperator::lindbladian(h, {}), duration, dt);
}

Superoperator laser_map(const LambdaConfig& cfg, const BranchingRates& relax, double gamma_dp,
                        double duration, double dt) {
  require_segment(duration, dt);
  if (!(gamma_dp >= 0.0)) throw InvalidArgument("laser.gamma_dp must be non-negative");
  if (!(relax.gamma_d >= 0.0 && relax.gamma_b >= 0.0))
    throw InvalidArgument("laser branching rates must be non-negative");
  if (duration == 0.0) return Superoperator::identity();

  const auto basis = dark_bright_basis(cfg);
  const Vector3c e = Vector3c::Unit(excited);
  const std::array<Matrix3c, 3> jumps{std::sqrt(relax.gamma_d) * outer(ground_state(basis.dark), e),
                                      std::sqrt(relax.gamma_b) * outer(ground_state(basis.bright), e),
                                      nuclear_dephasing(gamma_dp)};
  const Matrix3c h = frame_generator(cfg);
  require_dissipative_step(relax.gamma_d + relax.gamma_b + gamma_dp + max_abs(h), dt);
  return rk4_map(Superoperator::lindbladian(h, jumps), duration, dt);
}

Superoperator wait_map(const LambdaConfig& cfg, double duration, double gamma_2n, double t1_e, double dt) {
  require_segment(duration, dt);
  if (!(gamma_2n >= 0.0)) throw InvalidArgument("relaxation.gamma_2n must be non-negative");
  if (!(t1_e > 0.0)) throw InvalidArgument("relaxation.t1_e must be positive");
  if (duration == 0.0) return Superoperator::identity();

  const Matrix3c h = frame_generator(cfg);
  std::vector<Matrix3c> jumps;
  if (gamma_2n > 0.0) jumps.push_back(nuclear_dephasing(gamma_2n));
  double t1_rate = 0.0;
  if (std::isfinite(t1_e)) {
    t1_rate = 1.0 / t1_e;
    const Vector3c e = Vector3c::Unit(excited);
    for (Level g : {up, down}) {
      const Vector3c ket = Vector3c::Unit(g);
      jumps.push_back(std::sqrt(t1_rate / 2) * outer(e, ket));
      jumps.push_back(std::sqrt(t1_rate / 4) * outer(ket, e));
    }
  }
  if (jumps.empty()) return unitary_map(h, duration);
  require_dissipative_step(gamma_2n + t1_rate + max_abs(h), dt);
  return rk4_map(Superoperator::lindbladian(h, jumps), duration, dt);
}

DensityMatrix evolve_pulse(const DensityMatrix& rho, const LambdaConfig& cfg, double duration, double dt,
                           Integrator integrator) {
  return pulse_map(cfg, duration, dt, integrator).apply(rho);
}

DensityMatrix apply_laser(const DensityMatrix& rho, const LambdaConfig& cfg, const BranchingRates& relax,
                          double gamma_dp, double duration, double dt) {
  return laser_map(cfg, relax, gamma_dp, duration, dt).apply(rho);
}

DensityMatrix apply_wait(const DensityMatrix& rho, const LambdaConfig& cfg, double duration, double gamma_2n,
                         double t1_e, double dt) {
  return wait_map(cfg, duration, gamma_2n, t1_e, dt).apply(rho);
}

void validate(const SequenceConfig& seq) {
  auto non_negative = [](double v, const char* key) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(key) + " must be finite and non-negative");
  };
  non_negative(seq.t_mw, "sequence.t_mw");
  non_negative(seq.t_wait_pre, "sequence.t_wait_pre");
  non_negative(seq.t_laser, "sequence.t_laser");
  non_negative(seq.t_wait_post, "sequence.t_wait_post");
  if (!(seq.t_seq >= seq.packed_duration() - 1e-9))
    throw InvalidArgument("sequence.t_seq = " + std::to_string(seq.t_seq) +
                          " is shorter than t_mw + t_wait_pre + t_laser + t_wait_post = " +
                          std::to_string(seq.packed_duration()));
  if (seq.n_reps < 0) throw InvalidArgument("sequence.n_reps must be non-negative");
  if (!(seq.dt > 0.0)) throw InvalidArgument("sequence.dt must be positive");
  non_negative(seq.gamma_dp, "laser.gamma_dp");
  non_negative(seq.gamma_2n, "relaxation.gamma_2n");
  if (!(seq.t1_e > 0.0)) throw InvalidArgument("relaxation.t1_e must be positive");
  validate(seq.lambda);
  const auto& r = seq.relax;
  if (!(r.gamma > 0.0)) throw InvalidArgument("laser.gamma must be positive");
  if (!(r.alpha_p >= 0.0 && r.alpha_p <= 1.0)) throw InvalidArgument("laser.alpha_p must lie in [0, 1]");
  if (std::abs(r.gamma_d + r.gamma_b - r.gamma) > 1e-12 * std::max(1.0, r.gamma))
    throw InvalidArgument("laser branching rates must sum to gamma");
}

double dephasing_rate_for(double alpha_dp, double t_laser) {
  if (!(alpha_dp >= 0.0 && alpha_dp < 1.0)) throw InvalidArgument("alpha_dp must lie in [0, 1)");
  if (!(t_laser > 0.0)) throw InvalidArgument("t_laser must be positive");
  return -std::log1p(-alpha_dp) / t_laser;
}

SequenceConfig reference_sequence() {
  SequenceConfig seq;
  seq.lambda.theta = 1.14;
  seq.lambda.phi = 0.0;
  seq.lambda = with_pulse_area(seq.lambda, pi, seq.t_mw, 1.0);
  seq.lambda.psi = -phase_difference_for_efficiency(seq.lambda.theta, 1.0, 0.43);
  seq.relax = branching_rates(20.0, seq.lambda);
  seq.gamma_dp = dephasing_rate_for(0.12, seq.t_laser);
  return seq;
}

std::vector<double> StepTrace::excited() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.p_excited);
  return out;
}

SequenceResult run_cpt_sequence(const DensityMatrix& rho0, const SequenceConfig& seq) {
  validate(seq);
  SequenceResult result{StepTrace{}, rho0};
  if (seq.n_reps == 0) return result;

  const Superoperator drive =
      wait_map(seq.lambda, seq.effective_wait_pre(), seq.gamma_2n, seq.t1_e, seq.dt) *
      pulse_map(seq.lambda, seq.t_mw, seq.dt, seq.integrator);
  const Superoperator pump = wait_map(seq.lambda, seq.t_wait_post, seq.gamma_2n, seq.t1_e, seq.dt) *
                             laser_map(seq.lambda, seq.relax, seq.gamma_dp, seq.t_laser, seq.dt);

  const auto basis = dark_bright_basis(seq.lambda);
  const Vector3c dark = ground_state(basis.dark);
  const Vector3c bright = ground_state(basis.bright);

  DensityMatrix rho = rho0;
  result.trace.steps.reserve(static_cast<std::size_t>(seq.n_reps));
  for (int n = 1; n <= seq.n_reps; ++n) {
    rho = drive.apply(rho);
    result.trace.steps.push_back(StepRecord{n, rho.population(dark), rho.population(bright),
                                            rho.population(excited), rho.population(up), rho.population(down)});
    rho = pump.apply(rho);
  }
  result.final_state = rho;
  return result;
}

}  // namespace lambda_cpt
