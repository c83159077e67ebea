#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lambda_cpt/experiments.hpp"
#include "lambda_cpt/readout.hpp"

namespace lambda_cpt {

struct Table {
  std::vector<std::string> comments;  // header lines without the leading '#'
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

namespace schema {
inline const std::vector<std::string> spectrum{"delta_2_mhz", "signal_norm"};
inline const std::vector<std::string> trace{"step", "p_dark", "p_bright", "p_excited", "p_up", "p_down", "signal"};
inline const std::vector<std::string> composition{"ratio", "alpha_p", "p_dark_steady", "p_down",
                                                  "measured", "raw_probability", "ideal"};
inline const std::vector<std::string> comb{"order", "center_mhz", "width_mhz", "envelope_mhz"};
inline const std::vector<std::string> esr_lines{"index", "ground", "excited", "frequency_mhz", "weight"};
inline const std::vector<std::string> dips{"center_mhz", "fwhm_mhz", "amplitude", "center_err_mhz", "fwhm_err_mhz"};
inline const std::vector<std::string> saturation{"n_s", "p_inf", "p0", "alpha_p_eff", "alpha_dp", "residual_norm"};
inline const std::vector<std::string> contrast{"a"};
}  // namespace schema

/// Shortest text that is exact for 17 significant digits ("%.17g").
std::string format_double(double v);

/// UTF-8 CSV: '#' comment block, header row, one row per entry.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments, const Table& table);
Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text, const std::string& origin = "<memory>");

Table spectrum_table(const Spectrum& spec);
Table trace_table(const StepTrace& trace, std::span<const double> signal);
Table composition_table(const std::vector<CompositionPoint>& points);

Spectrum spectrum_from_table(const Table& t);
StepTrace trace_from_table(const Table& t);
std::vector<std::pair<double, double>> contrast_points_from_table(const Table& t);

}  // namespace lambda_cpt
