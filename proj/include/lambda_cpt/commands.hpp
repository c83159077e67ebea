#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lambda_cpt/config.hpp"

namespace lambda_cpt {

enum ExitCode : int {
  exit_ok = 0,
  exit_engine = 1,
  exit_parse = 2,
  exit_validation = 3,
  exit_fit = 4,
  exit_usage = 64,
};

struct RunOptions {
  std::string command;
  std::filesystem::path config;  // empty: all defaults
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

const std::vector<std::string>& command_names();

std::string software_version();

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Runs one subcommand, writes its CSV datasets and manifest.json into out_dir, and returns
/// the exit code. Config, engine and fit failures are reported on stderr and mapped to codes.
int run_command(const RunOptions& options);

/// Same, with an already loaded configuration (exceptions propagate).
int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& options);

}  // namespace lambda_cpt
