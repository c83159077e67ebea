#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lambda_cpt/commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lambda_cpt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("LAMBDA_CPT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for explicitly.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("LAMBDA_CPT_LOG: unknown level '{}'", env);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace lambda_cpt;

  CLI::App app{"Pulsed CPT simulator for a nuclear spin Λ-system", "lambda-cpt"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  RunOptions options;
  std::string config;
  std::string out_dir = ".";
  app.add_option("--config", config, "Configuration file (sectioned key = value)");
  app.add_option("--out", out_dir, "Output directory for datasets and manifest.json");
  app.add_option("--seed", options.seed, "RNG seed (used only when readout noise is enabled)");
  app.add_option("--workers", options.workers, "Worker threads for grid scans")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"esr-lines", "Eigenstates and the six ESR transitions"},
      {"cpt-spectrum", "CPT spectrum versus delta_2"},
      {"pump-steps", "Step-by-step dark-state pumping trace and saturation fit"},
      {"composition", "Dark-state composition versus Rabi ratio"},
      {"multi-resonance", "Spectra for a list of sequence durations"},
      {"comb-predict", "Frequency-comb prediction of dark resonances"},
      {"fit", "Fit an external dataset (spectrum, trace or composition)"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  options.command = app.get_subcommands().front()->get_name();
  options.config = config;
  options.out_dir = out_dir;
  return run_command(options);
}
