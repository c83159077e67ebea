#include "lambda_cpt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "lambda_cpt/readout.hpp"

namespace lambda_cpt {

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void require_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("scan grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvalidArgument("scan grid values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("scan grid must be strictly increasing");
  }
}

}  // namespace

double Spectrum::dip_contrast() const {
  if (signal.empty()) throw InvalidArgument("empty spectrum");
  return 1.0 - *std::min_element(signal.begin(), signal.end());
}

double Spectrum::minimum_position() const {
  if (signal.empty()) throw InvalidArgument("empty spectrum");
  return grid[static_cast<std::size_t>(std::min_element(signal.begin(), signal.end()) - signal.begin())];
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw InvalidArgument("grid needs at least one point");
  if (points == 1) return {lo};
  if (!(hi > lo)) throw InvalidArgument("grid upper bound must exceed the lower bound");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

int steady_window(int n_reps) { return std::min(n_reps, std::max(5, n_reps / 4)); }

Spectrum cpt_spectrum(const SequenceConfig& seq, double delta_1, std::span<const double> grid, unsigned workers) {
  require_grid(grid);
  validate(seq);
  if (seq.n_reps < 1) throw InvalidArgument("sequence.n_reps must be at least 1 for a spectrum");

  Spectrum spec;
  spec.grid.assign(grid.begin(), grid.end());
  spec.signal.assign(grid.size(), 0.0);
  spec.raw_excited.assign(grid.size(), 0.0);
  spec.delta_1 = delta_1;
  spec.sequence = seq;

  const int window = steady_window(seq.n_reps);
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    SequenceConfig point = seq;
    point.lambda.delta_1 = delta_1;
    point.lambda.delta_2 = grid[i];
    const auto result = run_cpt_sequence(DensityMatrix::thermal_ground(), point);
    const auto& steps = result.trace.steps;
    double mean = 0.0;
    for (auto it = steps.end() - window; it != steps.end(); ++it) mean += it->p_excited;
    mean /= window;
    const double first = steps.front().p_excited;
    if (!(first > 1e-12))
      throw EngineError("no excitation at delta_2 = " + std::to_string(grid[i]) +
                        " MHz; the calibration step is undefined");
    spec.raw_excited[i] = mean;
    spec.signal[i] = mean / (2.0 * first);
  });
  return spec;
}

PumpTrace pump_trace(const SequenceConfig& seq) {
  if (seq.lambda.delta_1 != 0.0 || seq.lambda.delta_2 != 0.0)
    throw InvalidArgument("pump trace requires resonant drive (delta_1 = delta_2 = 0)");
  auto result = run_cpt_sequence(DensityMatrix::thermal_ground(), seq);
  PumpTrace out;
  out.trace = std::move(result.trace);
  const auto excited = out.trace.excited();
  out.p_dark_estimate = extract_dark_population(excited, 1e-6);
  return out;
}

std::vector<CompositionPoint> composition_sweep(const SequenceConfig& seq, std::span<const double> ratios,
                                                double artificial_contrast) {
  if (seq.n_reps < 2) throw InvalidArgument("composition sweep needs at least two steps");
  std::vector<CompositionPoint> out;
  out.reserve(ratios.size());
  const double area = two_pi * seq.lambda.effective_rabi() * seq.t_mw;
  for (double r : ratios) {
    SequenceConfig point = seq;
    point.lambda = with_pulse_area(seq.lambda, area, seq.t_mw, r);
    point.relax = branching_rates(seq.relax.gamma, point.lambda);
    const auto result = run_cpt_sequence(DensityMatrix::thermal_ground(), point);
    const auto estimate = extract_dark_population(result.trace.excited(), 1e-6);
    const double p_dark = estimate.back();
    if (!(p_dark > 0.5 + 1e-3))
      throw EngineError("steady dark population " + std::to_string(p_dark) + " at ratio " + std::to_string(r) +
                        " is too close to 1/2 to invert the composition");
    // Selective π-pulse |0,↓> ↔ |+1,↓>: only |0,↑> remains bright.
    const auto& rho = result.final_state;
    const double p_down = rho.population(down) + rho.population(excited);
    CompositionPoint cp;
    cp.ratio = r;
    cp.alpha_p = point.relax.alpha_p;
    cp.p_dark_steady = p_dark;
    cp.p_down = p_down;
    cp.measured = (p_down - (1.0 - p_dark)) / (2.0 * p_dark - 1.0);
    cp.raw_probability = 0.5 + artificial_contrast * (cp.measured - 0.5);
    cp.ideal = std::isinf(r) ? 1.0 : r * r / (1.0 + r * r);
    out.push_back(cp);
  }
  return out;
}

std::vector<Spectrum> multi_resonance_scan(const SequenceConfig& base, std::span<const double> t_seq_list,
                                           std::span<const double> grid, unsigned workers) {
  std::vector<Spectrum> out;
  out.reserve(t_seq_list.size());
  for (double t : t_seq_list) {
    SequenceConfig seq = base;
    seq.t_seq = t;
    out.push_back(cpt_spectrum(seq, base.lambda.delta_1, grid, workers));
  }
  return out;
}

int CombPrediction::visible_side_orders() const {
  int count = 0;
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] >= 1 && dip_centers[i] < envelope_width / 2) ++count;
  return count;
}

CombPrediction comb_predict(double t_mw, double t_seq, double n_s, int n_max) {
  if (!(t_mw > 0.0)) throw InvalidArgument("comb.t_mw must be positive");
  if (!(t_seq >= t_mw)) throw InvalidArgument("comb.t_seq must be at least t_mw");
  if (!(n_s > 0.0)) throw InvalidArgument("comb.n_s must be positive");
  if (n_max < 0) throw InvalidArgument("comb.n_max must be non-negative");
  CombPrediction comb;
  comb.spacing = 1.0 / t_seq;
  comb.dip_width = 1.0 / (n_s * t_seq);
  comb.envelope_width = 1.0 / t_mw;
  for (int n = -n_max; n <= n_max; ++n) {
    comb.orders.push_back(n);
    comb.dip_centers.push_back(n / t_seq);
  }
  return comb;
}

double relaxation_linewidth(double n_s, double t1_e) {
  if (!(n_s > 0.0) || !(t1_e > 0.0)) throw InvalidArgument("N_s and T1 must be positive");
  return 1.0 / (n_s * t1_e);
}

double linewidth_limit(double gamma_1, double gamma_2n_star) {
  if (!(gamma_1 >= 0.0) || !(gamma_2n_star >= 0.0)) throw InvalidArgument("linewidth rates must be non-negative");
  return std::max(gamma_1, gamma_2n_star);
}

}  // namespace lambda_cpt
