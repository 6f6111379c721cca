#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mla/cli_io.hpp"
#include "mla/stability2d.hpp"

using namespace mla;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch_root() {
  static const struct Root {
    fs::path path = fs::temp_directory_path() / ("mla_cli_test_" + std::to_string(::getpid()));
    ~Root() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } root;
  return root.path;
}

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::vector<std::string> error_list(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
  for (const auto& e : errs) {
    if (e.find(what) != std::string::npos) return true;
  }
  return false;
}

ExperimentConfig config_in(const std::string& text, const fs::path& dir) {
  auto cfg = parse_config(text);
  cfg.output_dir = dir;
  return cfg;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + MLA_BINARY + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const auto cfg = parse_config(R"({"command": "simulate"})");
  CHECK(cfg.command == Command::simulate);
  CHECK(cfg.seed == 1);
  CHECK(cfg.output_dir == fs::path("mla_out"));
  CHECK(cfg.simulate.nu == 0.1);
  CHECK(cfg.simulate.n_modes == 64);
  CHECK(cfg.simulate.dealias_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(cfg.simulate.initial == "perturbation");
  const auto sq = parse_config(R"({"command": "squire"})");
  CHECK(sq.squire.s == 6);
  CHECK_FALSE(sq.squire.lambda.has_value());
  CHECK(sq.squire.count_s == std::vector<int>{50, 100, 200, 400});
}

TEST_CASE("validation errors name their fields") {
  const auto one = error_list(R"({"command": "simulate", "parameters": {"nu": -1}})");
  REQUIRE(one.size() == 1);
  CHECK(one[0].find("parameters.nu") != std::string::npos);
  CHECK(one[0].find("-1") != std::string::npos);

  const auto many =
      error_list(R"({"command": "simulate", "parameters": {"nu": -1, "dt": 0, "n_modes": 4, "colour": 3}})");
  CHECK(many.size() >= 4);
  CHECK(mentions(many, "parameters.nu"));
  CHECK(mentions(many, "parameters.dt"));
  CHECK(mentions(many, "parameters.n_modes"));
  CHECK(mentions(many, "parameters.colour: unknown key"));

  CHECK(mentions(error_list(R"({"command": "fly"})"), "command"));
  CHECK(mentions(error_list(R"({})"), "command: required"));
  CHECK(mentions(error_list(R"({"command": "bounds", "parameters": {"g_values": []}})"), "parameters.g_values"));
  CHECK(mentions(error_list(R"({"command": "simulate", "parameters": {"nu": "x"}})"), "parameters.nu"));
  CHECK(mentions(error_list(R"({"command": "squire", "parameters": {"c3": 0.2, "c4": 0.3, "delta_star": 0.2}})"),
                 "count window"));
  CHECK(mentions(error_list(R"({"command": "simulate", "parameters": {"n_modes": 16, "s": 9}})"),
                 "dealiasing cutoff"));
  CHECK_THROWS_AS(parse_config(R"({"command": "simulate", "parameters": {"nu": -1}})"), ValidationError);
}

TEST_CASE("syntax errors report line and column") {
  const auto errs = error_list("{\n  \"command\": \"bounds\",\n  \"seed\": ]\n}");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("line 3") != std::string::npos);
  CHECK(errs[0].find("column") != std::string::npos);
}

TEST_CASE("serialization round trip") {
  const std::string text =
      R"({"command": "stability", "seed": 42, "output_dir": "o",
          "parameters": {"s": 8, "delta": 0.25, "alpha": 0.01, "lambda": 30.5, "scaling_s": [10, 20]}})";
  const auto cfg = parse_config(text);
  const std::string once = serialize_config(cfg);
  const auto again = parse_config(once);
  CHECK(serialize_config(again) == once);
  CHECK(again.seed == 42);
  CHECK(again.stability.lambda.value() == 30.5);
  CHECK(again.stability.scaling_s == std::vector<int>{10, 20});
  CHECK(config_to_json(again)["parameters"]["curve_points"] == 40);
}

TEST_CASE("bounds command") {
  const auto dir = scratch("bounds");
  const auto cfg = config_in(R"({"command": "bounds"})", dir);
  const auto m = run_command(cfg);
  CHECK(m.ok);
  const auto rows = read_csv(dir / "bounds.csv");
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"g", "alpha", "upper1", "upper2", "lower", "ratio"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double u1 = std::stod(rows[i][2]), u2 = std::stod(rows[i][3]), lo = std::stod(rows[i][4]);
    CHECK(lo <= std::min(u1, u2));
  }
  CHECK(fs::exists(dir / "bounds_vs_g.csv"));
  CHECK(fs::exists(dir / "bounds_vs_g.svg"));
}

TEST_CASE("manifest hashes match the written files") {
  const auto dir = scratch("manifest");
  const auto m = run_command(config_in(R"({"command": "bounds"})", dir));
  const auto doc = json::parse(slurp(dir / "manifest.json"));
  CHECK(doc["config"]["command"] == "bounds");
  REQUIRE(doc["files"].size() == m.files.size());
  CHECK(m.files.size() >= 4);
  for (const auto& f : doc["files"]) {
    const fs::path p = dir / f["path"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(f["sha256"] == sha256_file(p));
    CHECK(f["bytes"] == fs::file_size(p));
    CHECK(f["path"] != "manifest.json");
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stability command at delta = 0.5") {
  const auto dir = scratch("stability");
  const auto cfg = config_in(
      R"({"command": "stability", "parameters": {"s": 6, "delta": 0.5, "scaling_s": [10], "curve_points": 24}})", dir);
  run_command(cfg);
  const auto rows = read_csv(dir / "sweep.csv");
  REQUIRE(rows.size() > 1);
  const auto& head = rows[0];
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(head.begin(), head.end(), name) - head.begin());
  };
  long long in_region = 0;
  double lambda0 = NAN;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][col("in_region")] == "1") {
      ++in_region;
      lambda0 = std::stod(rows[i][col("lambda0")]);
    }
  }
  CHECK(in_region == count_lattice(RegionSpec::make(0.5, 6)));
  CHECK(in_region == 1);

  // the growth curve changes sign at the threshold
  const auto curve = read_csv(dir / "sigma_vs_lambda.csv");
  REQUIRE(curve.size() > 2);
  bool crossed = false;
  for (std::size_t i = 2; i < curve.size(); ++i) {
    const double x0 = std::stod(curve[i - 1][1]), y0 = std::stod(curve[i - 1][2]);
    const double x1 = std::stod(curve[i][1]), y1 = std::stod(curve[i][2]);
    if (y0 <= 0.0 && y1 > 0.0) {
      crossed = true;
      CHECK(lambda0 >= x0);
      CHECK(lambda0 <= x1);
    }
  }
  CHECK(crossed);
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.contains("lower_bound_2d"));
}

TEST_CASE("stationary simulation stays put") {
  const auto dir = scratch("sim_stationary");
  const auto cfg = config_in(
      R"({"command": "simulate",
          "parameters": {"initial": "stationary", "n_modes": 32, "t_final": 1, "dt": 0.01, "nu": 0.5, "lambda": 0.5}})",
      dir);
  run_command(cfg);
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["phi_l2_relative_drift"].get<double>() < 1e-10);
  CHECK(fs::exists(dir / "final_psi.json"));
  CHECK(read_csv(dir / "diagnostics.csv").size() == 12);
}

TEST_CASE("outputs are reproducible across runs and thread counts") {
  const std::string sim = R"({"command": "simulate", "seed": 5, "parameters": {"n_modes": 32, "t_final": 0.5}})";
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_command(config_in(sim, a));
  run_command(config_in(sim, b));
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / "final_psi.json") == slurp(b / "final_psi.json"));

  const std::string stab =
      R"({"command": "stability", "parameters": {"s": 8, "delta": 0.3, "scaling_s": [10], "curve_points": 8}})";
  const auto c = scratch("det_c"), d = scratch("det_d");
  run_command(config_in(stab, c), {1, false});
  run_command(config_in(stab, d), {4, false});
  for (const char* f : {"sweep.csv", "sigma_vs_lambda.csv", "lattice_scaling.csv", "summary.json"}) {
    CAPTURE(f);
    CHECK(slurp(c / f) == slurp(d / f));
  }
  CHECK_FALSE(fs::exists(c / "sweep.svg"));
}

TEST_CASE("plot data") {
  const auto dir = scratch("plot");
  const auto files = emit_plot_data({PlotKind::bounds_vs_g, {}}, dir, "empty", true);
  CHECK(slurp(dir / "empty.csv") == "series,x,y\n");
  CHECK(files.size() == 2);
  emit_plot_data({PlotKind::spectrum, {{"pts", {1.0, -2.5}, {0.0, 3.0}}}}, dir, "pts", false);
  const auto rows = read_csv(dir / "pts.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[2] == std::vector<std::string>{"pts", "-2.5", "3"});
  CHECK_FALSE(fs::exists(dir / "pts.svg"));
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(NAN) == "nan");
}

TEST_CASE("failed runs are recorded in the manifest") {
  const auto dir = scratch("fail");
  const auto cfg = config_in(
      R"({"command": "simulate",
          "parameters": {"n_modes": 32, "dt": 1, "t_final": 50, "nu": 0.001, "perturbation_amplitude": 50,
                         "enforce_cfl": false}})",
      dir);
  CHECK_THROWS_AS(run_command(cfg), NumericalError);
  const auto doc = json::parse(slurp(dir / "manifest.json"));
  CHECK(doc["status"] == "error");
  CHECK(doc["error_kind"] == "numerical");
  CHECK(doc["error"].get<std::string>().find("non-finite") != std::string::npos);

  // the same step with the guard on is rejected as a bad input
  auto guarded = cfg;
  guarded.simulate.enforce_cfl = true;
  CHECK_THROWS_AS(run_command(guarded), ValidationError);
  CHECK(json::parse(slurp(dir / "manifest.json"))["error_kind"] == "validation");
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  write_text(dir / "bounds.json", R"({"parameters": {"g_values": [100, 1000]}})");
  write_text(dir / "bad.json", R"({"parameters": {"nu": -1}})");
  write_text(dir / "broken.json", "{\"parameters\": ");
  write_text(dir / "mismatch.json", R"({"command": "bounds"})");
  write_text(dir / "cfl.json",
             R"({"parameters": {"n_modes": 32, "dt": 1, "t_final": 5, "nu": 0.001, "perturbation_amplitude": 50}})");
  write_text(dir / "blowup.json", R"({"parameters": {"n_modes": 32, "dt": 1, "t_final": 50, "nu": 0.001,
                                                     "perturbation_amplitude": 50, "enforce_cfl": false}})");
  write_text(dir / "blocker", "");
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "bounds.csv"));
  CHECK(run_cli("simulate --config " + (dir / "bad.json").string() + out) == 2);
  CHECK(run_cli("simulate --config " + (dir / "broken.json").string() + out) == 2);
  CHECK(run_cli("simulate --config " + (dir / "mismatch.json").string() + out) == 2);
  CHECK(run_cli("simulate --config " + (dir / "missing.json").string() + out) == 2);
  CHECK(run_cli("simulate" + out) == 2);
  CHECK(run_cli("fly --config " + (dir / "bounds.json").string()) == 2);
  CHECK(run_cli("simulate --config " + (dir / "cfl.json").string() + out) == 2);
  CHECK(run_cli("simulate --config " + (dir / "blowup.json").string() + out) == 3);
  // output directory below a regular file
  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + " --out " + (dir / "blocker" / "x").string()) == 1);

  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + out, "MLA_THREADS=3") == 0);
  CHECK(json::parse(slurp(dir / "out" / "manifest.json"))["threads"] == 3);
  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + out + " --threads 2", "MLA_THREADS=3") == 0);
  CHECK(json::parse(slurp(dir / "out" / "manifest.json"))["threads"] == 2);
  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + out, "MLA_THREADS=zero") == 2);
  CHECK(run_cli("bounds --config " + (dir / "bounds.json").string() + out + " --threads 0") == 2);
}
