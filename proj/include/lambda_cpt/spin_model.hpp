#pragma once

#include <array>
#include <string>
#include <vector>

#include "lambda_cpt/common.hpp"

namespace lambda_cpt {

struct PhysicalConstants {
  double d = 2870.0;        // zero-field splitting, MHz
  double gamma_e = 2.8;     // electron gyromagnetic ratio, MHz/G
  double gamma_n = 1.07e-3; // 13C gyromagnetic ratio, MHz/G
};

struct HyperfineParams {
  double a_zz = 1.0;   // MHz
  double a_ani = 0.3;  // MHz
  double phi = 0.0;    // rad, in [0, 2π)
};

/// Longitudinal hyperfine value that reproduces θ = 1.14 rad at 850 G with a_ani = 0.3 MHz.
inline constexpr double a_zz_site_one = 1.047;

struct SpinSystemParams {
  PhysicalConstants constants;
  HyperfineParams hyperfine;
  double b_field = 850.0;  // G, along the NV axis
};

/// Throws InvalidArgument naming the offending field.
void validate(const SpinSystemParams& params);

struct MixingAngles {
  double theta = 0.0;        // m_s = -1 manifold
  double theta_prime = 0.0;  // m_s = +1 manifold
};

MixingAngles mixing_angles(const SpinSystemParams& params);

enum class ElectronManifold { zero, minus_one, plus_one };

struct EigenState {
  ElectronManifold manifold;
  Spinor nuclear;  // components on (|↑>, |↓>)
};

struct EigenSystem {
  double theta = 0.0;
  double theta_prime = 0.0;
  std::array<double, 6> energies{};   // ν1..ν6, MHz
  std::array<EigenState, 6> states{}; // ψ1..ψ6
};

EigenSystem eigensystem(const SpinSystemParams& params);

struct EsrLine {
  int index = 0;  // 1..6
  double frequency = 0.0;  // MHz
  double weight = 0.0;     // |<nuclear_ground|nuclear_excited>|^2
  int ground = 0;   // eigenstate index (1-based)
  int excited = 0;  // eigenstate index (1-based)

  std::string label() const;
};

/// Four m_s=0 → -1 lines (①–④) followed by the two nuclear-spin-conserving
/// m_s=0 → +1 lines (⑤ = ψ2→ψ5, ⑥ = ψ1→ψ6).
std::vector<EsrLine> esr_lines(const EigenSystem& eig);

}  // namespace lambda_cpt
