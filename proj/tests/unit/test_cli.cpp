#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lambda_cpt/commands.hpp"
#include "lambda_cpt/dataset_io.hpp"
#include "lambda_cpt/fitting.hpp"

using namespace lambda_cpt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(LAMBDA_CPT_TEST_SCRATCH) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LAMBDA_CPT_BIN + "\" " + args + " 2>/dev/null >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config: empty document gives defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.spin.b_field == 850.0);
  CHECK(cfg.sequence.t_mw == 6.0);
  CHECK(cfg.sequence.t_laser == 0.3);
  CHECK(cfg.sequence.relax.gamma == 20.0);
  CHECK(cfg.sequence.t_seq == doctest::Approx(7.4));
  CHECK(cfg.sequence.lambda.effective_rabi() == doctest::Approx(1.0 / 12));
}

TEST_CASE("config: derived quantities") {
  const auto cfg = parse_config("[spin]\na_zz = 1.047\n[lambda]\nalpha_p = 0.43\n[laser]\nalpha_dp = 0.12\n");
  CHECK(cfg.sequence.relax.alpha_p == doctest::Approx(0.43).epsilon(1e-12));
  CHECK(cfg.sequence.gamma_dp == doctest::Approx(0.42611).epsilon(1e-4));
  CHECK(cfg.sequence.lambda.theta == doctest::Approx(1.14).epsilon(0.005));
  const auto inf = parse_config("[lambda]\nratio = inf\n[relaxation]\nt1_e = inf\n");
  CHECK(inf.sequence.lambda.omega_2 == 0.0);
  CHECK(std::isinf(inf.sequence.t1_e));
}

TEST_CASE("config: errors carry key paths and kinds") {
  CHECK_THROWS_WITH_AS(parse_config("[spin]\nb_field = -1\n"), doctest::Contains("spin.b_field"),
                       ConfigValidationError);
  CHECK_THROWS_WITH_AS(parse_config("[sequence]\nt_seq = 5\n"), doctest::Contains("sequence.t_seq"),
                       ConfigValidationError);
  CHECK_THROWS_WITH_AS(parse_config("[spin]\nbfield = 3\n"), doctest::Contains("spin.bfield"),
                       ConfigValidationError);
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigValidationError);
  CHECK_THROWS_WITH_AS(parse_config("[spin]\nb_field = abc\n"), doctest::Contains("spin.b_field"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[spin\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[lambda]\npsi = 0\nalpha_p = 0.5\n"), ConfigValidationError);
}

TEST_CASE("CSV formatting and round trip") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  const auto dir = scratch("roundtrip");
  const auto empty = dir / "empty.csv";
  write_csv(empty, {"header"}, Table{{}, schema::spectrum, {}});
  CHECK(slurp(empty) == "# header\ndelta_2_mhz,signal_norm\n");
  CHECK(read_csv(empty).rows.empty());

  Table t{{}, schema::trace, {{1, 0.5, 0.1, 0.4, 0.25, 0.35, 0.88}, {2, 1.0 / 3, 1e-300, 0.6, 0.1, 0.2, 0.9}}};
  write_csv(dir / "t.csv", {"a", "b"}, t);
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.columns == schema::trace);
  CHECK(back.rows == t.rows);
  CHECK(back.comments == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(write_csv(dir / "missing" / "x.csv", {}, t), std::runtime_error);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), InvalidArgument);
}

TEST_CASE("CLI: usage and config exit codes") {
  const auto dir = scratch("codes");
  CHECK(run_cli("not-a-command --out " + dir.string()) == exit_usage);
  CHECK(run_cli("") == exit_usage);
  const auto bad = write_file(dir / "bad.ini", "[spin]\nb_field = -1\n");
  CHECK(run_cli("esr-lines --config " + bad.string() + " --out " + dir.string()) == exit_validation);
  const auto broken = write_file(dir / "broken.ini", "[spin\n");
  CHECK(run_cli("esr-lines --config " + broken.string() + " --out " + dir.string()) == exit_parse);
  CHECK(run_cli("esr-lines --config " + (dir / "absent.ini").string() + " --out " + dir.string()) == exit_parse);
  const auto nofit = write_file(dir / "nofit.ini", "[fit]\nkind = spectrum\n");
  CHECK(run_cli("fit --config " + nofit.string() + " --out " + dir.string()) == exit_validation);
}

TEST_CASE("CLI: cpt-spectrum minimum lies at two-photon resonance") {
  const auto dir = scratch("spectrum");
  REQUIRE(run_cli("cpt-spectrum --workers 3 --out " + dir.string()) == exit_ok);
  const auto spec = spectrum_from_table(read_csv(dir / "spectrum.csv"));
  CHECK(std::abs(spec.minimum_position()) < 1e-9);
  const auto text = slurp(dir / "spectrum.csv");
  CHECK(text.rfind("# lambda-cpt", 0) == 0);
  CHECK(text.find("manifest_sha256: ") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("CLI: comb-predict rows") {
  const auto dir = scratch("comb");
  const auto cfg = write_file(dir / "c.ini", "[comb]\nt_seq = 25\nn_s = 1.8\nn_max = 3\n");
  REQUIRE(run_cli("comb-predict --config " + cfg.string() + " --out " + dir.string()) == exit_ok);
  const auto t = read_csv(dir / "comb.csv");
  const auto centers = t.column("center_mhz");
  REQUIRE(centers.size() == 7);
  for (std::size_t i = 1; i < centers.size(); ++i) CHECK(centers[i] - centers[i - 1] == doctest::Approx(0.04));
  CHECK(t.column("width_mhz")[0] == doctest::Approx(0.0222).epsilon(1e-3));
}

TEST_CASE("CLI: datasets reload through the fitting readers") {
  const auto dir = scratch("reload");
  REQUIRE(run_cli("pump-steps --out " + dir.string()) == exit_ok);
  const auto trace = trace_from_table(read_csv(dir / "trace.csv"));
  CHECK(trace.size() == 40);
  CHECK(fit_saturation(trace).converged);

  REQUIRE(run_cli("composition --out " + dir.string()) == exit_ok);
  const auto points = contrast_points_from_table(read_csv(dir / "composition.csv"));
  CHECK(points.size() == 5);

  const auto spec_cfg = write_file(dir / "s.ini", "[scan]\npoints = 61\ndelta_2_min = -0.03\ndelta_2_max = 0.03\n");
  REQUIRE(run_cli("cpt-spectrum --config " + spec_cfg.string() + " --out " + dir.string()) == exit_ok);
  const auto fit_cfg = write_file(dir / "f.ini", "[fit]\ninput = spectrum.csv\nkind = spectrum\n");
  REQUIRE(run_cli("fit --config " + fit_cfg.string() + " --out " + dir.string()) == exit_ok);
  const auto dips = read_csv(dir / "dips.csv");
  CHECK(std::abs(dips.column("center_mhz")[0]) < 1e-4);
}

TEST_CASE("CLI: identical config and seed give byte-identical datasets") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto cfg = write_file(a / "noisy.ini", "[readout]\nnoise_sigma = 0.01\n[scan]\npoints = 21\n");
  REQUIRE(run_cli("cpt-spectrum --seed 42 --workers 1 --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run_cli("cpt-spectrum --seed 42 --workers 4 --config " + cfg.string() + " --out " + b.string()) == 0);
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
  const auto c = scratch("det_c");
  REQUIRE(run_cli("cpt-spectrum --seed 43 --config " + cfg.string() + " --out " + c.string()) == 0);
  CHECK(slurp(a / "spectrum.csv") != slurp(c / "spectrum.csv"));
}
