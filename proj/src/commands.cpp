#include "lambda_cpt/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "lambda_cpt/dataset_io.hpp"
#include "lambda_cpt/fitting.hpp"
#include "lambda_cpt/rate_model.hpp"

#ifndef LAMBDA_CPT_VERSION
#define LAMBDA_CPT_VERSION "0.0.0"
#endif

namespace lambda_cpt {

namespace {

using nlohmann::json;

class Session {
 public:
  Session(const std::string& command, const RunConfig& cfg, const RunOptions& options)
      : command_(command), options_(options) {
    inputs_ = {{"command", command},
               {"version", software_version()},
               {"seed", options.seed},
               {"config", to_json(cfg)}};
    hash_ = sha256_hex(inputs_.dump());
    std::filesystem::create_directories(options.out_dir);
  }

  void emit(const std::string& name, Table table) {
    const auto path = options_.out_dir / name;
    write_csv(path, {"lambda-cpt " + software_version(), "command: " + command_, "manifest_sha256: " + hash_},
              table);
    outputs_.push_back(name);
    spdlog::info("wrote {} ({} rows)", path.string(), table.rows.size());
  }

  json& results() { return results_; }

  void finish(double wall_time) {
    json manifest = inputs_;
    manifest["inputs_sha256"] = hash_;
    manifest["outputs"] = outputs_;
    manifest["results"] = results_;
    manifest["wall_time_s"] = wall_time;
    manifest["workers"] = options_.workers;
    std::ofstream out(options_.out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error((options_.out_dir / "manifest.json").string() + ": write failed");
  }

 private:
  std::string command_;
  RunOptions options_;
  json inputs_;
  json results_ = json::object();
  std::string hash_;
  std::vector<std::string> outputs_;
};

std::vector<double> scan_grid(const RunConfig& cfg) {
  return linear_grid(cfg.scan.delta_2_min, cfg.scan.delta_2_max, cfg.scan.points);
}

int esr_lines_cmd(const RunConfig& cfg, Session& s) {
  const auto eig = eigensystem(cfg.spin);
  Table t{{}, schema::esr_lines, {}};
  for (const auto& line : esr_lines(eig))
    t.rows.push_back({double(line.index), double(line.ground), double(line.excited), line.frequency, line.weight});
  s.emit("esr_lines.csv", std::move(t));
  s.results() = {{"theta", eig.theta}, {"theta_prime", eig.theta_prime}};
  return exit_ok;
}

int cpt_spectrum_cmd(const RunConfig& cfg, const RunOptions& o, Session& s) {
  const auto grid = scan_grid(cfg);
  auto spec = cpt_spectrum(cfg.sequence, cfg.sequence.lambda.delta_1, grid, o.workers);
  add_shot_noise(spec.signal, cfg.readout, o.seed);
  s.emit("spectrum.csv", spectrum_table(spec));
  s.results() = {{"minimum_delta_2_mhz", spec.minimum_position()}, {"dip_contrast", spec.dip_contrast()}};
  return exit_ok;
}

int pump_steps_cmd(const RunConfig& cfg, const RunOptions& o, Session& s) {
  const auto pt = pump_trace(cfg.sequence);
  std::vector<double> signal;
  for (const auto& step : pt.trace.steps) signal.push_back(readout_signal(step.p_excited, cfg.readout));
  add_shot_noise(signal, cfg.readout, o.seed);
  s.emit("trace.csv", trace_table(pt.trace, signal));
  if (pt.p_dark_estimate.size() < 5) return exit_ok;

  const auto fit = fit_saturation(pt);
  Table t{{}, schema::saturation, {}};
  double alpha_p_eff = std::nan(""), alpha_dp = std::nan("");
  if (fit.identifiable) {
    try {
      const auto inv = simplified_from_fit(fit.n_s, fit.p_inf);
      alpha_p_eff = inv.alpha_p_eff;
      alpha_dp = inv.alpha_dp;
    } catch (const InvalidArgument& e) {
      spdlog::warn("saturation fit does not map onto (alpha_p', alpha_dp): {}", e.what());
    }
  }
  t.rows.push_back({fit.n_s, fit.p_inf, fit.p0, alpha_p_eff, alpha_dp, fit.residual_norm});
  s.emit("saturation.csv", std::move(t));
  s.results() = {{"n_s", fit.n_s}, {"p_inf", fit.p_inf}, {"converged", fit.converged}};
  return fit.converged ? exit_ok : exit_fit;
}

int composition_cmd(const RunConfig& cfg, Session& s) {
  const auto points = composition_sweep(cfg.sequence, cfg.scan.ratios, cfg.scan.artificial_contrast);
  s.emit("composition.csv", composition_table(points));
  if (points.size() >= 3) {
    std::vector<std::pair<double, double>> raw;
    for (const auto& p : points) raw.emplace_back(p.ratio, p.raw_probability);
    try {
      const double a = fit_contrast_curve(raw);
      s.emit("contrast.csv", Table{{}, schema::contrast, {{a}}});
      s.results() = {{"artificial_contrast_fit", a}};
    } catch (const InvalidArgument& e) {
      spdlog::warn("contrast fit skipped: {}", e.what());
    }
  }
  return exit_ok;
}

int multi_resonance_cmd(const RunConfig& cfg, const RunOptions& o, Session& s) {
  const auto grid = scan_grid(cfg);
  const auto spectra = multi_resonance_scan(cfg.sequence, cfg.scan.t_seq_list, grid, o.workers);
  json minima = json::array();
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    auto spec = spectra[i];
    add_shot_noise(spec.signal, cfg.readout, o.seed + i);
    char name[64];
    std::snprintf(name, sizeof name, "spectrum_tseq_%g.csv", cfg.scan.t_seq_list[i]);
    s.emit(name, spectrum_table(spec));
    minima.push_back(spec.minimum_position());
  }
  s.results() = {{"minimum_delta_2_mhz", minima}};
  return exit_ok;
}

int comb_cmd(const RunConfig& cfg, Session& s) {
  const auto comb = comb_predict(cfg.sequence.t_mw, cfg.comb.t_seq, cfg.comb.n_s, cfg.comb.n_max);
  Table t{{}, schema::comb, {}};
  for (std::size_t i = 0; i < comb.orders.size(); ++i)
    t.rows.push_back({double(comb.orders[i]), comb.dip_centers[i], comb.dip_width, comb.envelope_width});
  s.emit("comb.csv", std::move(t));
  s.results() = {{"spacing_mhz", comb.spacing}, {"visible_side_orders", comb.visible_side_orders()}};
  return exit_ok;
}

int fit_cmd(const RunConfig& cfg, Session& s) {
  if (cfg.fit.input.empty()) throw ConfigValidationError("fit.input: a dataset path is required");
  const auto table = read_csv(cfg.fit.input);
  if (cfg.fit.kind == "spectrum") {
    DipFitOptions opt;
    opt.init_centers = cfg.fit.init_centers;
    const auto fit = fit_dips(spectrum_from_table(table), cfg.fit.dips, opt);
    Table t{{}, schema::dips, {}};
    for (std::size_t i = 0; i < fit.centers.size(); ++i) {
      const double ce = i < fit.center_errors.size() ? fit.center_errors[i] : std::nan("");
      const double we = i < fit.fwhm_errors.size() ? fit.fwhm_errors[i] : std::nan("");
      t.rows.push_back({fit.centers[i], fit.fwhms[i], fit.amplitudes[i], ce, we});
    }
    s.emit("dips.csv", std::move(t));
    s.results() = {{"baseline", fit.baseline}, {"residual_norm", fit.residual_norm},
                   {"converged", fit.converged}, {"no_dip", fit.no_dip}};
    return fit.converged ? exit_ok : exit_fit;
  }
  if (cfg.fit.kind == "trace") {
    const auto fit = fit_saturation(trace_from_table(table));
    double alpha_p_eff = std::nan(""), alpha_dp = std::nan("");
    if (fit.identifiable) {
      try {
        const auto inv = simplified_from_fit(fit.n_s, fit.p_inf);
        alpha_p_eff = inv.alpha_p_eff;
        alpha_dp = inv.alpha_dp;
      } catch (const InvalidArgument& e) {
        spdlog::warn("saturation fit does not map onto (alpha_p', alpha_dp): {}", e.what());
      }
    }
    s.emit("saturation.csv",
           Table{{}, schema::saturation, {{fit.n_s, fit.p_inf, fit.p0, alpha_p_eff, alpha_dp, fit.residual_norm}}});
    s.results() = {{"converged", fit.converged}, {"identifiable", fit.identifiable}};
    return fit.converged ? exit_ok : exit_fit;
  }
  const double a = fit_contrast_curve(contrast_points_from_table(table));
  s.emit("contrast.csv", Table{{}, schema::contrast, {{a}}});
  return exit_ok;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"esr-lines",       "cpt-spectrum", "pump-steps", "composition",
                                              "multi-resonance", "comb-predict", "fit"};
  return names;
}

std::string software_version() { return LAMBDA_CPT_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& options) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) return exit_usage;
  const auto start = std::chrono::steady_clock::now();
  Session session(command, cfg, options);
  int code = exit_ok;
  if (command == "esr-lines") code = esr_lines_cmd(cfg, session);
  else if (command == "cpt-spectrum") code = cpt_spectrum_cmd(cfg, options, session);
  else if (command == "pump-steps") code = pump_steps_cmd(cfg, options, session);
  else if (command == "composition") code = composition_cmd(cfg, session);
  else if (command == "multi-resonance") code = multi_resonance_cmd(cfg, options, session);
  else if (command == "comb-predict") code = comb_cmd(cfg, session);
  else code = fit_cmd(cfg, session);
  session.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  if (code == exit_fit) spdlog::error("{}: fit did not converge; best-so-far parameters written", command);
  return code;
}

int run_command(const RunOptions& options) {
  RunConfig cfg;
  try {
    cfg = options.config.empty() ? parse_config("") : load_config(options.config);
  } catch (const ConfigParseError& e) {
    spdlog::error("config parse error: {}", e.what());
    return exit_parse;
  } catch (const ConfigValidationError& e) {
    spdlog::error("config validation error: {}", e.what());
    return exit_validation;
  }
  try {
    return run_command(options.command, cfg, options);
  } catch (const ConfigValidationError& e) {
    spdlog::error("config validation error: {}", e.what());
    return exit_validation;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", options.command, e.what());
    return exit_engine;
  }
}

}  // namespace lambda_cpt
