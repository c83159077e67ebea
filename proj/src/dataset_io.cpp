#include "lambda_cpt/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lambda_cpt {

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("dataset has no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw InvalidArgument(path.string() + ": row width does not match the column header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Table parse_csv(const std::string& text, const std::string& origin) {
  Table t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      t.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.columns.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!header) throw InvalidArgument(origin + ": missing column header");
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open dataset");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.string());
}

Table spectrum_table(const Spectrum& spec) {
  Table t{{}, schema::spectrum, {}};
  for (std::size_t i = 0; i < spec.size(); ++i) t.rows.push_back({spec.grid[i], spec.signal[i]});
  return t;
}

Table trace_table(const StepTrace& trace, std::span<const double> signal) {
  if (signal.size() != trace.size()) throw InvalidArgument("signal series does not match the trace length");
  Table t{{}, schema::trace, {}};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace.steps[i];
    t.rows.push_back({static_cast<double>(s.step), s.p_dark, s.p_bright, s.p_excited, s.p_up, s.p_down, signal[i]});
  }
  return t;
}

Table composition_table(const std::vector<CompositionPoint>& points) {
  Table t{{}, schema::composition, {}};
  for (const auto& p : points)
    t.rows.push_back({p.ratio, p.alpha_p, p.p_dark_steady, p.p_down, p.measured, p.raw_probability, p.ideal});
  return t;
}

Spectrum spectrum_from_table(const Table& t) {
  Spectrum s;
  s.grid = t.column("delta_2_mhz");
  s.signal = t.column("signal_norm");
  for (std::size_t i = 1; i < s.grid.size(); ++i)
    if (!(s.grid[i] > s.grid[i - 1])) throw InvalidArgument("spectrum grid must be strictly increasing");
  return s;
}

StepTrace trace_from_table(const Table& t) {
  StepTrace trace;
  const auto step = t.column("step");
  const auto dark = t.column("p_dark");
  const auto bright = t.column("p_bright");
  const auto ex = t.column("p_excited");
  const auto pu = t.column("p_up");
  const auto pd = t.column("p_down");
  for (std::size_t i = 0; i < step.size(); ++i)
    trace.steps.push_back({static_cast<int>(step[i]), dark[i], bright[i], ex[i], pu[i], pd[i]});
  return trace;
}

std::vector<std::pair<double, double>> contrast_points_from_table(const Table& t) {
  const auto r = t.column("ratio");
  const auto p = t.column("raw_probability");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < r.size(); ++i) out.emplace_back(r[i], p[i]);
  return out;
}

}  // namespace lambda_cpt
