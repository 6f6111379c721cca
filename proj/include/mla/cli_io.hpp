#pragma once

// Batch experiment configuration, dispatch and result persistence.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mla/errors.hpp"

namespace mla {

enum class Command { simulate, stability, bounds, squire, report };

std::string to_string(Command c);
/// Throws ValidationError for an unknown name.
Command command_from_string(const std::string& name);

struct SimulateParams {
  double nu = 0.1;
  double alpha = 0.0;
  int n_modes = 64;
  double dealias_fraction = 2.0 / 3.0;
  int s = 4;
  double lambda = 3.125;
  double dt = 0.01;
  double t_final = 10.0;
  int sample_every = 10;
  /// "perturbation": random field of the given amplitude; "stationary": psi_s.
  std::string initial = "perturbation";
  double perturbation_amplitude = 1e-3;
  int perturbation_kmax = 8;
  double courant = 0.5;
  /// Reject steps above the advective limit; when off, an unstable run ends in a numerical failure.
  bool enforce_cfl = true;
  double tail_fraction = 0.5;
};

struct StabilityParams {
  int s = 6;
  double delta = 0.3;
  double alpha = 0.0;
  double nu = 1.0;
  /// Forcing parameter; when absent, lambda_factor times the upper Lambda_0 threshold in lambda form.
  std::optional<double> lambda;
  double lambda_factor = 1.5;
  bool compute_lambda0 = true;
  /// Largest recurrence half-width tried before a pair is reported as unconverged.
  int max_n_trunc = 512;
  /// Points on the sigma-vs-Lambda curve of the first in-region pair.
  int curve_points = 40;
  /// s values for the d(s)/s^2 scaling table.
  std::vector<int> scaling_s = {10, 20, 40, 80, 160, 200};
  /// Cutoff of the dense linearization whose spectrum is exported; 0 disables it.
  int dense_cutoff = 0;
};

struct BoundsParams {
  std::vector<double> g_values = {1e2, 1e3, 1e4};
  std::vector<double> alpha_values = {0.01, 0.05, 0.1};
  double lambda1 = 1.0;
  double l_const = 3.14159265358979323846;
  double eps_g = 0.0;
  double gamma = 0.5;
};

struct SquireParams {
  int s = 6;
  double delta = 1.0 / 6.0;
  double alpha = 0.0;
  double nu = 1.0;
  /// When absent, lambda_3 = sqrt2 lambda_2 for (s, alpha, delta).
  std::optional<double> lambda;
  /// "admissible": triples with (a_hat, r) in A(delta); "window": triples of the count window at s.
  std::string triples = "admissible";
  int max_triples = 10;
  double c2 = 0.1;
  double c3 = 0.45;
  double c4 = 0.56;
  double delta_star = 0.45;
  std::vector<int> count_s = {50, 100, 200, 400};
  double gamma = 0.5;
  /// When absent, the measured c5 of the count window at the largest count_s.
  std::optional<double> c6;
  double c8 = 1.0;
  std::vector<int> a0_b_values = {0, 1, 2};
  int a0_k_cutoff = 24;
};

struct ReportParams {
  double g = 1e4;
  double alpha = 0.05;
  double lambda1 = 1.0;
  double l_const = 3.14159265358979323846;
  double eps_g = 0.0;
  double gamma = 0.5;
  double delta_star = 0.4;
  double c6 = 1.0;
  double c8 = 1.0;
};

struct ExperimentConfig {
  Command command = Command::simulate;
  std::filesystem::path output_dir = "mla_out";
  std::uint64_t seed = 1;
  SimulateParams simulate;
  StabilityParams stability;
  BoundsParams bounds;
  SquireParams squire;
  ReportParams report;
};

/// Validation failure carrying every problem found, each prefixed by its field path.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates a JSON configuration. Throws ConfigError listing all
/// problems; syntax errors report line and column.
ExperimentConfig parse_config(const std::string& text);
/// Full configuration with every default made explicit.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  std::string started_utc;
  std::string finished_utc;
  int threads = 1;
  nlohmann::json tolerances;
  bool ok = true;
  /// "validation", "numerical" or "runtime" on failure.
  std::string error_kind;
  std::string error;
  std::vector<ManifestFile> files;
};

nlohmann::json manifest_to_json(const RunManifest& m);

struct RunOptions {
  int threads = 1;
  bool svg = true;
};

/// Runs the configured command, writing CSV/JSON outputs and manifest.json into
/// cfg.output_dir. Module errors are recorded in the manifest and rethrown.
RunManifest run_command(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// --- Plot data ---------------------------------------------------------------

enum class PlotKind { bounds_vs_g, sigma_vs_lambda, lattice_scaling, spectrum };

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotData {
  PlotKind kind = PlotKind::bounds_vs_g;
  std::vector<PlotSeries> series;
};

/// Writes <stem>.csv (series,x,y) and, when svg is set, <stem>.svg. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const PlotData& data, const std::filesystem::path& dir,
                                                  const std::string& stem, bool svg = true);

/// Shortest round-trip decimal form used in every CSV.
std::string format_number(double x);

}  // namespace mla
