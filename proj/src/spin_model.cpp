#include "lambda_cpt/spin_model.hpp"

#include <cmath>

namespace lambda_cpt {

void validate(const SpinSystemParams& params) {
  const auto& c = params.constants;
  if (!(c.d > 0.0)) throw InvalidArgument("spin.d must be positive");
  if (!(c.gamma_e > 0.0)) throw InvalidArgument("spin.gamma_e must be positive");
  if (!(c.gamma_n > 0.0)) throw InvalidArgument("spin.gamma_n must be positive");
  const auto& h = params.hyperfine;
  if (!(h.a_zz > 0.0)) throw InvalidArgument("spin.a_zz must be positive");
  if (!(h.a_ani >= 0.0)) throw InvalidArgument("spin.a_ani must be non-negative");
  if (!(h.phi >= 0.0 && h.phi < two_pi)) throw InvalidArgument("spin.phi must lie in [0, 2pi)");
  if (!(params.b_field >= 0.0)) throw InvalidArgument("spin.b_field must be non-negative");
}

MixingAngles mixing_angles(const SpinSystemParams& params) {
  const double nuclear_zeeman = params.constants.gamma_n * params.b_field;
  const auto& h = params.hyperfine;
  // atan2 keeps θ continuous through a_zz = γn·B (θ = π/2 there).
  return {std::atan2(h.a_ani, h.a_zz - nuclear_zeeman),
          std::atan2(h.a_ani, h.a_zz + nuclear_zeeman)};
}

namespace {

// +1 eigenvector of n·σ for n = (sinθ cosφ, sinθ sinφ, cosθ)
Spinor upper(double theta, double phi) {
  return Spinor(std::cos(theta / 2), std::sin(theta / 2) * std::exp(I * phi));
}

// -1 eigenvector of n·σ
Spinor lower(double theta, double phi) {
  return Spinor(-std::sin(theta / 2) * std::exp(-I * phi), std::cos(theta / 2));
}

}  // namespace

EigenSystem eigensystem(const SpinSystemParams& params) {
  const auto& c = params.constants;
  const auto& h = params.hyperfine;
  const double nz = c.gamma_n * params.b_field;
  const double ez = c.gamma_e * params.b_field;

  const auto angles = mixing_angles(params);
  const double split_minus = std::hypot(h.a_ani, h.a_zz - nz);
  const double split_plus = std::hypot(h.a_ani, h.a_zz + nz);

  EigenSystem eig;
  eig.theta = angles.theta;
  eig.theta_prime = angles.theta_prime;
  eig.energies = {nz / 2,
                  -nz / 2,
                  c.d - ez - split_minus / 2,
                  c.d - ez + split_minus / 2,
                  c.d + ez - split_plus / 2,
                  c.d + ez + split_plus / 2};

  // m_s = -1 block is -(R/2) n·σ, m_s = +1 block is +(R'/2) n'·σ.
  eig.states = {EigenState{ElectronManifold::zero, Spinor(1.0, 0.0)},
                EigenState{ElectronManifold::zero, Spinor(0.0, 1.0)},
                EigenState{ElectronManifold::minus_one, upper(angles.theta, h.phi)},
                EigenState{ElectronManifold::minus_one, lower(angles.theta, h.phi)},
                EigenState{ElectronManifold::plus_one, lower(angles.theta_prime, h.phi)},
                EigenState{ElectronManifold::plus_one, upper(angles.theta_prime, h.phi)}};
  return eig;
}

std::string EsrLine::label() const {
  return "L" + std::to_string(index) + ":psi" + std::to_string(ground) + "->psi" +
         std::to_string(excited);
}

std::vector<EsrLine> esr_lines(const EigenSystem& eig) {
  constexpr std::array<std::pair<int, int>, 6> transitions{
      {{1, 3}, {2, 3}, {1, 4}, {2, 4}, {2, 5}, {1, 6}}};
  std::vector<EsrLine> lines;
  lines.reserve(transitions.size());
  int index = 1;
  for (const auto& [g, e] : transitions) {
    const auto& gs = eig.states[g - 1].nuclear;
    const auto& es = eig.states[e - 1].nuclear;
    EsrLine line;
    line.index = index++;
    line.frequency = eig.energies[e - 1] - eig.energies[g - 1];
    line.weight = std::norm(gs.dot(es));
    line.ground = g;
    line.excited = e;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace lambda_cpt
