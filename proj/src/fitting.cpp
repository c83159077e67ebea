#include "lambda_cpt/fitting.hpp"
#include <functional>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace lambda_cpt {

namespace {

using VectorXd = Eigen::VectorXd;

struct ResidualFunctor {
  using Scalar = double;
  using InputType = VectorXd;
  using ValueType = VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::function<void(const VectorXd&, VectorXd&)> residual;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const VectorXd& p, VectorXd& r) const {
    residual(p, r);
    return 0;
  }
};

struct LmOutcome {
  VectorXd params;
  VectorXd errors;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

LmOutcome least_squares(ResidualFunctor f, VectorXd p, int max_iterations, double ftol) {
  Eigen::NumericalDiff<ResidualFunctor> numeric(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> lm(numeric);
  lm.parameters.ftol = ftol;
  lm.parameters.xtol = ftol;
  lm.parameters.maxfev = max_iterations * (f.inputs() + 1);
  const auto status = lm.minimize(p);

  LmOutcome out;
  out.params = p;
  out.iterations = static_cast<int>(lm.iter);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  out.converged = status != Status::TooManyFunctionEvaluation && status != Status::ImproperInputParameters &&
                  status != Status::UserAsked && status != Status::NotStarted && status != Status::Running;

  VectorXd r(f.values());
  f(p, r);
  out.residual_norm = r.norm();

  Eigen::MatrixXd jac(f.values(), f.inputs());
  numeric.df(p, jac);
  const int dof = f.values() - f.inputs();
  out.errors = VectorXd::Constant(f.inputs(), std::numeric_limits<double>::quiet_NaN());
  if (dof > 0) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
      const double s2 = r.squaredNorm() / dof;
      out.errors = (s2 * lu.inverse()).diagonal().cwiseAbs().cwiseSqrt();
    }
  }
  return out;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Robust noise level from the MAD of second differences (insensitive to smooth structure).
double robust_noise(std::span<const double> y) {
  if (y.size() < 3) return 0.0;
  std::vector<double> d;
  d.reserve(y.size() - 2);
  for (std::size_t i = 1; i + 1 < y.size(); ++i) d.push_back(y[i + 1] - 2 * y[i] + y[i - 1]);
  const double m = median(d);
  for (double& v : d) v = std::abs(v - m);
  return 1.4826 * median(d) / std::sqrt(6.0);
}

double half_depth_width(std::span<const double> x, std::span<const double> y, std::size_t i, double baseline) {
  const double half = baseline - (baseline - y[i]) / 2;
  std::size_t lo = i, hi = i;
  while (lo > 0 && y[lo] < half) --lo;
  while (hi + 1 < y.size() && y[hi] < half) ++hi;
  const double step = x.size() > 1 ? (x.back() - x.front()) / static_cast<double>(x.size() - 1) : 1.0;
  return std::max(x[hi] - x[lo], 2 * step);
}

}  // namespace

double gaussian_dips(double x, double baseline, std::span<const double> centers, std::span<const double> fwhms,
                     std::span<const double> amplitudes) {
  double y = baseline;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double sigma = fwhms[i] / fwhm_per_sigma;
    const double u = (x - centers[i]) / sigma;
    y -= amplitudes[i] * std::exp(-0.5 * u * u);
  }
  return y;
}

DipFit fit_dips(std::span<const double> x, std::span<const double> y, int k, const DipFitOptions& options) {
  if (k < 1) throw InvalidArgument("fit.dips must be at least 1");
  if (x.size() != y.size()) throw InvalidArgument("x and y must have the same length");
  const auto n = static_cast<int>(x.size());
  if (n < 3 * k + 1) throw InvalidArgument("too few points for the requested number of dips");
  if (!options.init_centers.empty() && static_cast<int>(options.init_centers.size()) != k)
    throw InvalidArgument("number of initial centers must equal the dip count");

  DipFit fit;
  const double baseline = *std::max_element(y.begin(), y.end());
  const double noise = robust_noise(y);
  const double scale = std::max(baseline - *std::min_element(y.begin(), y.end()), 0.0);
  const double threshold = baseline - std::max(3 * noise, 1e-9 * std::max(1.0, std::abs(baseline)));

  std::vector<std::size_t> seeds;
  if (options.init_centers.empty()) {
    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool left = i == 0 || y[i] <= y[i - 1];
      const bool right = i + 1 == x.size() || y[i] <= y[i + 1];
      if (left && right && y[i] < threshold) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    if (minima.empty()) {
      fit.no_dip = true;
      fit.baseline = baseline;
      fit.converged = true;
      for (int i = 0; i < k; ++i) {
        fit.centers.push_back(x[x.size() / 2]);
        fit.fwhms.push_back(x.back() - x.front());
        fit.amplitudes.push_back(0.0);
      }
      double ss = 0.0;
      for (double v : y) ss += (v - baseline) * (v - baseline);
      fit.residual_norm = std::sqrt(ss);
      return fit;
    }
    minima.resize(std::min<std::size_t>(minima.size(), static_cast<std::size_t>(k)));
    seeds = minima;
    // Too few distinct minima: pad with the deepest one, slightly displaced.
    while (static_cast<int>(seeds.size()) < k) seeds.push_back(seeds.front());
  } else {
    for (double c : options.init_centers) {
      const auto it = std::lower_bound(x.begin(), x.end(), c);
      std::size_t i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - x.begin(), n - 1));
      if (i > 0 && std::abs(x[i - 1] - c) < std::abs(x[i] - c)) --i;
      seeds.push_back(i);
    }
  }

  VectorXd p(1 + 3 * k);
  p(0) = baseline;
  for (int j = 0; j < k; ++j) {
    const auto i = seeds[static_cast<std::size_t>(j)];
    const bool repeat = std::find(seeds.begin(), seeds.begin() + j, i) != seeds.begin() + j;
    const double w = half_depth_width(x, y, i, baseline);
    double c = options.init_centers.empty() ? x[i] : options.init_centers[static_cast<std::size_t>(j)];
    if (repeat) c += 0.25 * w * j;
    p(1 + 3 * j) = std::max(baseline - y[i], 0.1 * scale);
    p(2 + 3 * j) = c;
    p(3 + 3 * j) = w;
  }

  ResidualFunctor f;
  f.n_inputs = 1 + 3 * k;
  f.n_values = n;
  f.residual = [&](const VectorXd& q, VectorXd& r) {
    for (int i = 0; i < n; ++i) {
      double model = q(0);
      for (int j = 0; j < k; ++j) {
        const double sigma = q(3 + 3 * j) / fwhm_per_sigma;
        const double u = (x[static_cast<std::size_t>(i)] - q(2 + 3 * j)) / sigma;
        model -= q(1 + 3 * j) * std::exp(-0.5 * u * u);
      }
      r(i) = model - y[static_cast<std::size_t>(i)];
    }
  };
  const auto lm = least_squares(f, p, options.max_iterations, options.ftol);

  fit.baseline = lm.params(0);
  fit.residual_norm = lm.residual_norm;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged && std::isfinite(lm.residual_norm);
  for (int j = 0; j < k; ++j) {
    fit.amplitudes.push_back(lm.params(1 + 3 * j));
    fit.centers.push_back(lm.params(2 + 3 * j));
    fit.fwhms.push_back(std::abs(lm.params(3 + 3 * j)));
    fit.center_errors.push_back(lm.errors(2 + 3 * j));
    fit.fwhm_errors.push_back(lm.errors(3 + 3 * j));
  }
  if (!(std::all_of(fit.fwhms.begin(), fit.fwhms.end(), [](double w) { return w > 0.0; }))) fit.converged = false;

  std::vector<std::size_t> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fit.centers[a] < fit.centers[b]; });
  auto permute = [&](std::vector<double>& v) {
    std::vector<double> out;
    for (auto i : order) out.push_back(v[i]);
    v = std::move(out);
  };
  permute(fit.centers);
  permute(fit.fwhms);
  permute(fit.amplitudes);
  permute(fit.center_errors);
  permute(fit.fwhm_errors);
  return fit;
}

DipFit fit_dips(const Spectrum& spec, int k, const DipFitOptions& options) {
  return fit_dips(spec.grid, spec.signal, k, options);
}

double SaturationFit::predict(double n) const { return p_inf - (p_inf - p0) * std::exp(-n / n_s); }

SaturationFit fit_saturation(std::span<const double> steps, std::span<const double> p_dark, int max_iterations) {
  if (steps.size() != p_dark.size()) throw InvalidArgument("step and population series differ in length");
  if (p_dark.size() < 5) throw InvalidArgument("saturation fit needs at least 5 points");
  const auto n = static_cast<int>(p_dark.size());

  SaturationFit fit;
  const auto [lo, hi] = std::minmax_element(p_dark.begin(), p_dark.end());
  if (*hi - *lo < 1e-9) {
    fit.p_inf = fit.p0 = std::accumulate(p_dark.begin(), p_dark.end(), 0.0) / n;
    fit.n_s = std::numeric_limits<double>::quiet_NaN();
    fit.identifiable = false;
    fit.converged = true;
    return fit;
  }

  // Fit on q = e^{−1/N_s} so the one-step limit q → 0 stays regular.
  VectorXd p(3);
  p(0) = p_dark.back();
  p(1) = p_dark.front();
  const double d0 = p(0) - p_dark[0];
  const double d1 = p(0) - p_dark[1];
  p(2) = std::clamp(d0 != 0.0 ? d1 / d0 : 0.5, 0.05, 0.95);

  ResidualFunctor f;
  f.n_inputs = 3;
  f.n_values = n;
  f.residual = [&](const VectorXd& q, VectorXd& r) {
    const double base = std::abs(q(2));
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      r(i) = q(0) - (q(0) - q(1)) * std::pow(base, steps[idx]) - p_dark[idx];
    }
  };
  const auto lm = least_squares(f, p, max_iterations, 1e-12);

  const double q = std::clamp(std::abs(lm.params(2)), std::numeric_limits<double>::min(), 1.0);
  fit.p_inf = lm.params(0);
  fit.p0 = lm.params(1);
  fit.n_s = q < 1.0 ? -1.0 / std::log(q) : std::numeric_limits<double>::infinity();
  fit.residual_norm = lm.residual_norm;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  fit.identifiable = std::abs(fit.p_inf - fit.p0) > 1e-6 && std::isfinite(fit.n_s);
  return fit;
}

SaturationFit fit_saturation(const StepTrace& trace) {
  std::vector<double> n, p;
  for (const auto& s : trace.steps) {
    n.push_back(s.step - 1);
    p.push_back(s.p_dark);
  }
  return fit_saturation(n, p);
}

SaturationFit fit_saturation(const PumpTrace& trace) {
  std::vector<double> n(trace.p_dark_estimate.size());
  std::iota(n.begin(), n.end(), 0.0);
  return fit_saturation(n, trace.p_dark_estimate);
}

double contrast_model(double ratio, double a) {
  const double share = std::isinf(ratio) ? 1.0 : ratio * ratio / (1.0 + ratio * ratio);
  return 0.5 + a * (share - 0.5);
}

double fit_contrast_curve(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidArgument("contrast fit needs at least 3 points");
  double num = 0.0, den = 0.0;
  for (const auto& [r, prob] : points) {
    if (!(r >= 0.0)) throw InvalidArgument("Rabi ratios must be non-negative");
    const double g = contrast_model(r, 1.0) - 0.5;
    num += g * (prob - 0.5);
    den += g * g;
  }
  if (den < 1e-24) throw InvalidArgument("contrast fit is degenerate: all points sit at r = 1");
  return num / den;
}

}  // namespace lambda_cpt
