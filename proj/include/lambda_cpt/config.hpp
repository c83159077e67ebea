#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambda_cpt/dynamics.hpp"
#include "lambda_cpt/readout.hpp"
#include "lambda_cpt/spin_model.hpp"

namespace lambda_cpt {

/// Malformed document or value (exit code 2).
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed but invalid: unknown key or violated invariant (exit code 3).
class ConfigValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanSettings {
  double delta_2_min = -0.08;
  double delta_2_max = 0.08;
  int points = 201;
  std::vector<double> t_seq_list{10.0, 15.0, 25.0, 50.0};
  std::vector<double> ratios{0.25, 0.5, 1.0, 2.0, 4.0};
  double artificial_contrast = 1.0;
};

struct CombSettings {
  double t_seq = 25.0;
  double n_s = 1.8;
  int n_max = 5;
};

struct FitSettings {
  std::filesystem::path input;
  std::string kind = "spectrum";  // spectrum | trace | composition
  int dips = 1;
  std::vector<double> init_centers;
};

struct RunConfig {
  SpinSystemParams spin;
  SequenceConfig sequence;
  ReadoutModel readout;
  ScanSettings scan;
  CombSettings comb;
  FitSettings fit;
};

/// Sectioned key = value text; missing keys take defaults, unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Every resolved value, keyed by section.key.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace lambda_cpt
