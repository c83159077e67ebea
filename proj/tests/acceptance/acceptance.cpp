// Acceptance criteria 1-9. `acceptance N` runs one criterion, `acceptance` runs all of them.
// Each criterion prints a single "criterion N: PASS|FAIL ..." line.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "lambda_cpt/config.hpp"
#include "lambda_cpt/dynamics.hpp"
#include "lambda_cpt/experiments.hpp"
#include "lambda_cpt/fitting.hpp"
#include "lambda_cpt/lambda_system.hpp"
#include "lambda_cpt/rate_model.hpp"

using namespace lambda_cpt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::mt19937_64& rng() {
  static std::mt19937_64 gen(7919);
  return gen;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

// Fit of the single dip whose interior local minimum lies nearest `expected`, restricted to
// ±0.3 spacings around that minimum.
DipFit windowed_dip(const Spectrum& s, double expected, double spacing) {
  std::size_t best = 0;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (s.signal[i] < s.signal[i - 1] && s.signal[i] <= s.signal[i + 1] &&
        std::abs(s.grid[i] - expected) < nearest) {
      nearest = std::abs(s.grid[i] - expected);
      best = i;
    }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s.grid[i] - s.grid[best]) < 0.3 * spacing) {
      x.push_back(s.grid[i]);
      y.push_back(s.signal[i]);
    }
  return fit_dips(x, y, 1);
}

Spectrum comb_spectrum(const SequenceConfig& base, double t_seq) {
  SequenceConfig seq = base;
  seq.t_seq = t_seq;
  const auto grid = linear_grid(-1.5 / t_seq, 1.5 / t_seq, 241);
  return cpt_spectrum(seq, 0.0, grid, 4);
}

// 1. Steady-state polarization
Outcome criterion_1() {
  Outcome o;
  Stopwatch clock;
  const SimplifiedParams gen{0.43, 0.12};
  const double p_inf = steady_state(gen);
  const double n_s = characteristic_steps(gen);
  o.detail << "rate model P_D(inf) = " << p_inf << ", N_s = " << n_s;
  o.require(std::abs(p_inf - 0.8796) < 5e-5, "P_D(inf) = 0.8796");
  o.require(std::abs(n_s - 1.4497) < 1e-3, "N_s = 1.4497");
  o.require(std::abs(p_inf - 0.88) <= 0.03, "P_D(inf) within 0.88 +- 0.03");
  o.require(std::abs(n_s - 1.4) <= 0.3, "N_s within 1.4 +- 0.3");

  auto seq = reference_sequence();
  const auto trace = pump_trace(seq);
  const double engine = trace.trace.steps.back().p_dark;
  o.detail << "; engine P_D(" << seq.n_reps << ") = " << engine;
  o.require(std::abs(engine - p_inf) < 0.02, "engine P_D within 0.02");
  const double t = clock.seconds();
  o.detail << "; " << t << " s";
  o.require(t < 1.0, "runtime < 1 s");
  return o;
}

// 2. CPT dip at δ1 = 0
Outcome criterion_2() {
  Outcome o;
  Stopwatch clock;
  const auto grid = linear_grid(-0.08, 0.08, 201);
  const double step = grid[1] - grid[0];
  auto seq = reference_sequence();
  seq.gamma_dp = 0.0;
  const auto clean = cpt_spectrum(seq, 0.0, grid, 4);
  const auto lossy = cpt_spectrum(reference_sequence(), 0.0, grid, 4);
  o.detail << "minimum at " << clean.minimum_position() << " / " << lossy.minimum_position()
           << " MHz, contrast " << clean.dip_contrast() << " (Gamma_dp = 0), " << lossy.dip_contrast()
           << " (alpha_dp = 0.12)";
  o.require(std::abs(clean.minimum_position()) < step, "minimum within one grid step (Gamma_dp = 0)");
  o.require(std::abs(lossy.minimum_position()) < step, "minimum within one grid step (alpha_dp = 0.12)");
  o.require(clean.dip_contrast() > 0.99, "contrast > 0.99");
  o.require(lossy.dip_contrast() >= 0.85 && lossy.dip_contrast() <= 0.95, "contrast in [0.85, 0.95]");
  const double t = clock.seconds();
  o.detail << "; " << t << " s";
  o.require(t < 30.0, "runtime < 30 s");
  return o;
}

// 3. Dip tracking
Outcome criterion_3() {
  Outcome o;
  const auto seq = reference_sequence();
  for (double d1 : {-0.05, 0.0, 0.05}) {
    const auto grid = linear_grid(d1 - 0.03, d1 + 0.03, 121);
    const auto fit = fit_dips(cpt_spectrum(seq, d1, grid, 4), 1);
    if (!fit.converged || fit.no_dip) {
      o.require(false, "fit converged at delta_1 = " + std::to_string(d1));
      continue;
    }
    const double rel = std::abs(fit.centers[0] - d1) / fit.fwhms[0];
    o.detail << "delta_1 = " << d1 << ": center " << fit.centers[0] << ", offset/FWHM " << rel << "; ";
    o.require(rel < 0.05, "offset < 5% FWHM at delta_1 = " + std::to_string(d1));
  }
  return o;
}

// 4. Multi-resonance period
Outcome criterion_4() {
  Outcome o;
  Stopwatch clock;
  const auto base = reference_sequence();
  for (double t_seq : {10.0, 15.0, 25.0, 50.0}) {
    const auto s = comb_spectrum(base, t_seq);
    const double guess = 1.0 / t_seq;
    const auto hi = windowed_dip(s, guess, guess);
    const auto lo = windowed_dip(s, -guess, guess);
    if (!hi.converged || !lo.converged || hi.no_dip || lo.no_dip) {
      o.require(false, "side dips fitted at T_seq = " + std::to_string(t_seq));
      continue;
    }
    const double spacing = (hi.centers[0] - lo.centers[0]) / 2;
    o.detail << "T_seq = " << t_seq << ": Delta*T_seq = " << spacing * t_seq << "; ";
    o.require(std::abs(spacing * t_seq - 1) < 0.02, "|Delta*T_seq - 1| < 0.02 at T_seq = " + std::to_string(t_seq));
  }
  const double t = clock.seconds();
  o.detail << t << " s";
  o.require(t < 180.0, "runtime < 3 min");
  return o;
}

// 5. Width law
Outcome criterion_5() {
  Outcome o;
  const auto base = reference_sequence();
  const auto sat = fit_saturation(pump_trace(base));
  o.detail << "N_s = " << sat.n_s << "; ";
  o.require(sat.converged && sat.identifiable, "saturation fit converged");
  for (double t_seq : {10.0, 15.0, 25.0, 50.0}) {
    const auto s = comb_spectrum(base, t_seq);
    const auto fit = windowed_dip(s, 0.0, 1.0 / t_seq);
    if (!fit.converged || fit.no_dip) {
      o.require(false, "central dip fitted at T_seq = " + std::to_string(t_seq));
      continue;
    }
    const double product = fit.fwhms[0] * sat.n_s * t_seq;
    o.detail << "T_seq = " << t_seq << ": FWHM*N_s*T_seq = " << product << "; ";
    o.require(product >= 0.85 && product <= 1.15, "FWHM*N_s*T_seq in [0.85, 1.15] at T_seq = " +
                                                      std::to_string(t_seq));
  }
  return o;
}

// 6. Composition law
Outcome criterion_6() {
  Outcome o;
  auto seq = reference_sequence();
  seq.lambda.psi = 0.0;
  seq.gamma_dp = 0.0;
  seq.n_reps = 20;
  const std::vector<double> ratios{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto exact = composition_sweep(seq, ratios);
  double worst = 0.0;
  for (const auto& p : exact) worst = std::max(worst, std::abs(p.measured - p.ratio * p.ratio / (1 + p.ratio * p.ratio)));
  o.detail << "max |p - r^2/(1+r^2)| = " << worst;
  o.require(worst < 0.02, "composition within 0.02");

  const auto imperfect = composition_sweep(seq, ratios, 0.78);
  std::vector<std::pair<double, double>> points;
  for (const auto& p : imperfect) points.emplace_back(p.ratio, p.raw_probability);
  const double a = fit_contrast_curve(points);
  o.detail << "; recovered a = " << a;
  o.require(std::abs(a - 0.78) < 0.01, "contrast recovered within 0.01");
  return o;
}

// 7. Oracle equivalences
Outcome criterion_7() {
  Outcome o;
  Stopwatch clock;

  double worst_closed = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = uniform(-0.999, 0.999);
    const double b = uniform(-1.0, 1.0);
    const double p0 = uniform(0.0, 1.0);
    const int n = static_cast<int>(uniform(0, 200));
    double p = p0;
    for (int k = 0; k < n; ++k) p = a * p + b;
    worst_closed = std::max(worst_closed, std::abs(population_after_n(a, b, p0, n) - p));
  }
  o.detail << "closed form " << worst_closed;
  o.require(worst_closed < 1e-12, "closed form vs iteration 1e-12");

  double worst_alpha = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    LambdaConfig c;
    c.omega_1 = uniform(0.0, 2.0);
    c.omega_2 = uniform(0.01, 2.0);
    c.psi = uniform(-pi, pi);
    c.theta = uniform(0.0, pi);
    c.phi = uniform(0.0, 2 * pi);
    const double n = std::hypot(c.omega_1, c.omega_2);
    const std::array<cplx, 2> dark{c.omega_2 / n * std::exp(-I * c.psi), -c.omega_1 / n};
    const std::array<cplx, 2> excited{-std::sin(c.theta / 2) * std::exp(-I * c.phi), std::cos(c.theta / 2)};
    const double overlap = std::norm(std::conj(excited[0]) * dark[0] + std::conj(excited[1]) * dark[1]);
    worst_alpha = std::max(worst_alpha, std::abs(overlap - polarization_efficiency(c)));
  }
  o.detail << ", alpha_p " << worst_alpha;
  o.require(worst_alpha < 1e-12, "alpha_p vs spinor inner product 1e-12");

  using State = std::array<double, 3>;
  namespace odeint = boost::numeric::odeint;
  double worst_ode = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const PumpStepParams p{uniform(0, 1), uniform(0, pi), uniform(5, 30), uniform(0, 2), 0.3};
    const double pd0 = uniform(0, 1);
    const double s = std::pow(std::sin(p.pulse_area / 2), 2);
    auto rhs = [&](const State& y, State& dy, double) {
      const double exchange = p.gamma_dp / 2 * (y[1] - y[2]);
      dy[0] = -p.gamma * y[0];
      dy[1] = p.gamma * p.alpha_p * y[0] - exchange;
      dy[2] = p.gamma * (1 - p.alpha_p) * y[0] + exchange;
    };
    State y{s * (1 - pd0), pd0, (1 - s) * (1 - pd0)};
    double t_prev = 0.0;
    for (double t : {0.01, 0.1, 0.3, 1.0}) {
      odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-14, 1e-14), rhs, y,
                                 t_prev, t, 1e-4);
      t_prev = t;
      worst_ode = std::max(worst_ode, std::abs(y[1] - laser_dark_population(p, pd0, t)));
    }
  }
  o.detail << ", ODE " << worst_ode;
  o.require(worst_ode < 1e-8, "ODE vs printed P_D(t) 1e-8");

  std::vector<Superoperator> maps;
  for (int i = 0; i < 24; ++i) {
    LambdaConfig c;
    c.omega_1 = uniform(0.0, 0.3);
    c.omega_2 = uniform(0.01, 0.3);
    c.psi = uniform(-pi, pi);
    c.theta = uniform(0.0, pi);
    c.delta_1 = uniform(-0.2, 0.2);
    c.delta_2 = uniform(-0.2, 0.2);
    switch (i % 3) {
      case 0: maps.push_back(pulse_map(c, uniform(0.0, 8.0))); break;
      case 1: maps.push_back(laser_map(c, branching_rates(uniform(1, 30), c), uniform(0, 1), uniform(0.0, 0.5))); break;
      default: maps.push_back(wait_map(c, uniform(0.0, 3.0), uniform(0, 0.5), uniform(5, 100)));
    }
  }
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = m(1, 1) = 0.5;
  m(0, 1) = m(1, 0) = 0.3;
  auto rho = DensityMatrix::from_matrix(m);
  std::uniform_int_distribution<std::size_t> pick(0, maps.size() - 1);
  double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
  for (int k = 0; k < 10000; ++k) {
    rho = maps[pick(rng())].apply(rho);
    worst_trace = std::max(worst_trace, std::abs(rho.trace() - 1.0));
    worst_herm = std::max(worst_herm, rho.hermiticity_error());
    worst_eig = std::min(worst_eig, rho.min_eigenvalue());
  }
  o.detail << ", engine trace " << worst_trace << " herm " << worst_herm << " min eig " << worst_eig;
  o.require(worst_trace < 1e-9 && worst_herm < 1e-9 && worst_eig > -1e-9, "engine preserves a physical state");

  const double t = clock.seconds();
  o.detail << "; " << t << " s";
  o.require(t < 10.0, "runtime < 10 s");
  return o;
}

// 8. Dark-state decoupling
Outcome criterion_8() {
  Outcome o;
  auto seq = reference_sequence();
  seq.gamma_dp = 0.0;
  seq.n_reps = 50;
  const auto dark = DensityMatrix::pure(ground_state(dark_bright_basis(seq.lambda).dark));
  const auto r = run_cpt_sequence(dark, seq);
  const double change = (r.final_state.matrix().diagonal() - dark.matrix().diagonal()).cwiseAbs().maxCoeff();
  const double leak = std::abs(1.0 - r.final_state.population(ground_state(dark_bright_basis(seq.lambda).dark)));
  o.detail << "max population change " << change << ", dark-state loss " << leak;
  o.require(change < 1e-6 && leak < 1e-6, "population change < 1e-6 after 50 cycles");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. Determinism of every example config
Outcome criterion_9() {
  Outcome o;
  const fs::path configs = LAMBDA_CPT_CONFIGS;
  const fs::path scratch = fs::path(LAMBDA_CPT_TEST_SCRATCH) / "acceptance9";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs))
    if (e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  o.require(!files.empty(), "example configs present");
  int compared = 0;
  for (const auto& cfg : files) {
    std::ifstream in(cfg);
    std::string first;
    std::getline(in, first);
    std::istringstream words(first);
    std::string token, command, workers;
    std::vector<std::string> tokens;
    while (words >> token) tokens.push_back(token);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (tokens[i] == "lambda-cpt") command = tokens[i + 1];
      if (tokens[i] == "--workers") workers = tokens[i + 1];
    }
    if (command.empty()) {
      o.require(false, "subcommand named in " + cfg.filename().string());
      continue;
    }
    std::array<fs::path, 2> dirs;
    for (int run = 0; run < 2; ++run) {
      dirs[run] = scratch / cfg.stem() / ("run" + std::to_string(run));
      fs::remove_all(dirs[run]);
      fs::create_directories(dirs[run]);
      std::string cmd = std::string("\"") + LAMBDA_CPT_BIN + "\" " + command + " --config \"" + cfg.string() +
                        "\" --out \"" + dirs[run].string() + "\"";
      if (!workers.empty()) cmd += " --workers " + workers;
      cmd += " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, cfg.filename().string() + " exits 0");
    }
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(dirs[0]))
      if (e.path().extension() == ".csv") csvs.push_back(e.path().filename());
    o.require(!csvs.empty(), cfg.filename().string() + " writes CSV output");
    for (const auto& name : csvs) {
      const bool same = fs::exists(dirs[1] / name) && slurp(dirs[0] / name) == slurp(dirs[1] / name);
      o.require(same, cfg.stem().string() + "/" + name.string() + " byte-identical");
      ++compared;
    }
  }
  o.detail << files.size() << " configs, " << compared << " CSV files compared";
  return o;
}

const std::array<std::function<Outcome()>, 9> criteria{criterion_1, criterion_2, criterion_3,
                                                       criterion_4, criterion_5, criterion_6,
                                                       criterion_7, criterion_8, criterion_9};

bool run(int n) {
  Outcome o;
  try {
    o = criteria[static_cast<std::size_t>(n - 1)]();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  std::printf("criterion %d: %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "usage: acceptance [1-9 ...]\n");
      return 64;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (int n = 1; n <= 9; ++n) which.push_back(n);
  bool all = true;
  for (int n : which) all = run(n) && all;
  return all ? 0 : 1;
}
