#include "lambda_cpt/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace lambda_cpt {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> known_keys{
    {"spin", {"d", "gamma_e", "gamma_n", "a_zz", "a_ani", "phi", "b_field"}},
    {"lambda", {"omega_1", "omega_2", "pulse_area", "ratio", "delta_1", "delta_2", "psi", "alpha_p"}},
    {"sequence", {"t_mw", "t_wait_pre", "t_laser", "t_wait_post", "t_seq", "n_reps", "dt", "integrator"}},
    {"laser", {"gamma", "gamma_dp", "alpha_dp"}},
    {"relaxation", {"gamma_2n", "t1_e"}},
    {"readout", {"contrast", "reference_0", "noise_sigma"}},
    {"scan", {"delta_2_min", "delta_2_max", "points", "t_seq_list", "ratios", "artificial_contrast"}},
    {"comb", {"t_seq", "n_s", "n_max"}},
    {"fit", {"input", "kind", "dips", "init_centers"}},
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigParseError(key + ": expected a number, got '" + raw + "'");
  return value;
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigParseError(key + ": expected an integer, got '" + raw + "'");
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& path) const { return tree_.get_child_optional(pt::ptree::path_type(path, '.')).has_value(); }
  std::string text(const std::string& path) const { return tree_.get<std::string>(pt::ptree::path_type(path, '.')); }

  void number(const std::string& path, double& out) const {
    if (has(path)) out = parse_number(path, text(path));
  }
  void integer(const std::string& path, int& out) const {
    if (has(path)) out = parse_int(path, text(path));
  }
  void list(const std::string& path, std::vector<double>& out) const {
    if (has(path)) out = parse_list(path, text(path));
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, child] : tree) {
    const auto it = known_keys.find(section);
    if (it == known_keys.end()) {
      if (child.empty()) throw ConfigValidationError(section + ": keys must belong to a section");
      throw ConfigValidationError(section + ": unknown section");
    }
    for (const auto& [key, _] : child)
      if (!it->second.contains(key)) throw ConfigValidationError(section + "." + key + ": unknown key");
  }
}

template <class Fn>
void validated(Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    throw ConfigValidationError(e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigParseError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(tree);
  const Reader r(tree);
  RunConfig cfg;

  auto& spin = cfg.spin;
  r.number("spin.d", spin.constants.d);
  r.number("spin.gamma_e", spin.constants.gamma_e);
  r.number("spin.gamma_n", spin.constants.gamma_n);
  r.number("spin.a_zz", spin.hyperfine.a_zz);
  r.number("spin.a_ani", spin.hyperfine.a_ani);
  r.number("spin.phi", spin.hyperfine.phi);
  r.number("spin.b_field", spin.b_field);
  validated([&] { validate(spin); });

  auto& seq = cfg.sequence;
  r.number("sequence.t_mw", seq.t_mw);
  r.number("sequence.t_wait_pre", seq.t_wait_pre);
  r.number("sequence.t_laser", seq.t_laser);
  r.number("sequence.t_wait_post", seq.t_wait_post);
  seq.t_seq = seq.packed_duration();
  r.number("sequence.t_seq", seq.t_seq);
  r.integer("sequence.n_reps", seq.n_reps);
  r.number("sequence.dt", seq.dt);
  if (r.has("sequence.integrator")) {
    const auto name = trim(r.text("sequence.integrator"));
    if (name == "exact") seq.integrator = Integrator::exact;
    else if (name == "rk4") seq.integrator = Integrator::rk4;
    else throw ConfigValidationError("sequence.integrator: expected 'exact' or 'rk4', got '" + name + "'");
  }

  auto& lam = seq.lambda;
  lam.theta = mixing_angles(spin).theta;
  lam.phi = spin.hyperfine.phi;
  r.number("lambda.delta_1", lam.delta_1);
  r.number("lambda.delta_2", lam.delta_2);
  const bool explicit_rabi = r.has("lambda.omega_1") || r.has("lambda.omega_2");
  if (explicit_rabi && (r.has("lambda.pulse_area") || r.has("lambda.ratio")))
    throw ConfigValidationError("lambda.omega_1/omega_2 and lambda.pulse_area/ratio are mutually exclusive");
  if (explicit_rabi) {
    r.number("lambda.omega_1", lam.omega_1);
    r.number("lambda.omega_2", lam.omega_2);
  } else {
    double area = pi, ratio = 1.0;
    r.number("lambda.pulse_area", area);
    r.number("lambda.ratio", ratio);
    validated([&] { lam = with_pulse_area(lam, area, seq.t_mw, ratio); });
  }
  if (r.has("lambda.psi") && r.has("lambda.alpha_p"))
    throw ConfigValidationError("lambda.psi and lambda.alpha_p are mutually exclusive");
  r.number("lambda.psi", lam.psi);
  if (r.has("lambda.alpha_p")) {
    double target = 0.0;
    r.number("lambda.alpha_p", target);
    if (!(lam.omega_2 > 0.0)) throw ConfigValidationError("lambda.alpha_p: needs omega_2 > 0 to tune the phase");
    validated([&] {
      lam.psi = lam.phi - phase_difference_for_efficiency(lam.theta, lam.omega_1 / lam.omega_2, target);
    });
  }
  validated([&] { validate(lam); });

  double gamma = 20.0;
  r.number("laser.gamma", gamma);
  if (r.has("laser.gamma_dp") && r.has("laser.alpha_dp"))
    throw ConfigValidationError("laser.gamma_dp and laser.alpha_dp are mutually exclusive");
  r.number("laser.gamma_dp", seq.gamma_dp);
  if (r.has("laser.alpha_dp")) {
    double alpha_dp = 0.0;
    r.number("laser.alpha_dp", alpha_dp);
    validated([&] { seq.gamma_dp = dephasing_rate_for(alpha_dp, seq.t_laser); });
  }
  validated([&] { seq.relax = branching_rates(gamma, lam); });
  r.number("relaxation.gamma_2n", seq.gamma_2n);
  r.number("relaxation.t1_e", seq.t1_e);
  validated([&] { validate(seq); });

  r.number("readout.contrast", cfg.readout.contrast);
  r.number("readout.reference_0", cfg.readout.reference_0);
  r.number("readout.noise_sigma", cfg.readout.noise_sigma);
  validated([&] { validate(cfg.readout); });

  auto& scan = cfg.scan;
  r.number("scan.delta_2_min", scan.delta_2_min);
  r.number("scan.delta_2_max", scan.delta_2_max);
  r.integer("scan.points", scan.points);
  r.list("scan.t_seq_list", scan.t_seq_list);
  r.list("scan.ratios", scan.ratios);
  r.number("scan.artificial_contrast", scan.artificial_contrast);
  if (scan.points < 1) throw ConfigValidationError("scan.points must be at least 1");
  if (scan.points > 1 && !(scan.delta_2_max > scan.delta_2_min))
    throw ConfigValidationError("scan.delta_2_max must exceed scan.delta_2_min");
  for (double t : scan.t_seq_list)
    if (!(t >= seq.packed_duration() - 1e-9))
      throw ConfigValidationError("scan.t_seq_list: " + std::to_string(t) +
                                  " us is shorter than the packed sequence duration");
  for (double ratio : scan.ratios)
    if (!(ratio >= 0.0)) throw ConfigValidationError("scan.ratios must be non-negative");

  r.number("comb.t_seq", cfg.comb.t_seq);
  r.number("comb.n_s", cfg.comb.n_s);
  r.integer("comb.n_max", cfg.comb.n_max);
  if (!(cfg.comb.t_seq >= seq.t_mw)) throw ConfigValidationError("comb.t_seq must be at least sequence.t_mw");
  if (!(cfg.comb.n_s > 0.0)) throw ConfigValidationError("comb.n_s must be positive");
  if (cfg.comb.n_max < 0) throw ConfigValidationError("comb.n_max must be non-negative");

  if (r.has("fit.input")) {
    std::filesystem::path input = trim(r.text("fit.input"));
    cfg.fit.input = input.is_relative() && !base_dir.empty() ? base_dir / input : input;
  }
  if (r.has("fit.kind")) cfg.fit.kind = trim(r.text("fit.kind"));
  if (cfg.fit.kind != "spectrum" && cfg.fit.kind != "trace" && cfg.fit.kind != "composition")
    throw ConfigValidationError("fit.kind: expected spectrum, trace or composition");
  r.integer("fit.dips", cfg.fit.dips);
  r.list("fit.init_centers", cfg.fit.init_centers);
  if (cfg.fit.dips < 1) throw ConfigValidationError("fit.dips must be at least 1");
  if (!cfg.fit.init_centers.empty() && static_cast<int>(cfg.fit.init_centers.size()) != cfg.fit.dips)
    throw ConfigValidationError("fit.init_centers must list exactly fit.dips values");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

nlohmann::json to_json(const RunConfig& cfg) {
  // Non-finite values are not representable in JSON; they are stored as strings.
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  const auto& s = cfg.sequence;
  const auto& l = s.lambda;
  nlohmann::json j;
  j["spin"] = {{"d", num(cfg.spin.constants.d)},        {"gamma_e", num(cfg.spin.constants.gamma_e)},
               {"gamma_n", num(cfg.spin.constants.gamma_n)}, {"a_zz", num(cfg.spin.hyperfine.a_zz)},
               {"a_ani", num(cfg.spin.hyperfine.a_ani)},  {"phi", num(cfg.spin.hyperfine.phi)},
               {"b_field", num(cfg.spin.b_field)}};
  j["lambda"] = {{"omega_1", num(l.omega_1)}, {"omega_2", num(l.omega_2)}, {"delta_1", num(l.delta_1)},
                 {"delta_2", num(l.delta_2)}, {"psi", num(l.psi)},         {"theta", num(l.theta)},
                 {"phi", num(l.phi)}};
  j["sequence"] = {{"t_mw", num(s.t_mw)},     {"t_wait_pre", num(s.t_wait_pre)}, {"t_laser", num(s.t_laser)},
                   {"t_wait_post", num(s.t_wait_post)}, {"t_seq", num(s.t_seq)},  {"n_reps", s.n_reps},
                   {"dt", num(s.dt)}, {"integrator", s.integrator == Integrator::exact ? "exact" : "rk4"}};
  j["laser"] = {{"gamma", num(s.relax.gamma)}, {"alpha_p", num(s.relax.alpha_p)}, {"gamma_dp", num(s.gamma_dp)}};
  j["relaxation"] = {{"gamma_2n", num(s.gamma_2n)}, {"t1_e", num(s.t1_e)}};
  j["readout"] = {{"contrast", num(cfg.readout.contrast)},
                  {"reference_0", num(cfg.readout.reference_0)},
                  {"noise_sigma", num(cfg.readout.noise_sigma)}};
  j["scan"] = {{"delta_2_min", num(cfg.scan.delta_2_min)}, {"delta_2_max", num(cfg.scan.delta_2_max)},
               {"points", cfg.scan.points},                {"t_seq_list", cfg.scan.t_seq_list},
               {"ratios", cfg.scan.ratios},                {"artificial_contrast", num(cfg.scan.artificial_contrast)}};
  j["comb"] = {{"t_seq", num(cfg.comb.t_seq)}, {"n_s", num(cfg.comb.n_s)}, {"n_max", cfg.comb.n_max}};
  j["fit"] = {{"input", cfg.fit.input.generic_string()}, {"kind", cfg.fit.kind}, {"dips", cfg.fit.dips},
              {"init_centers", cfg.fit.init_centers}};
  return j;
}

}  // namespace lambda_cpt
