#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mla/cli_io.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int threads_from_env() {
  const char* env = std::getenv("MLA_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw mla::ValidationError(std::string("MLA_THREADS must be a positive integer (got '") + env + "')");
  return static_cast<int>(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mla::ValidationError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leray-alpha attractor dimension experiments"};
  app.set_version_flag("--version", MLA_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool no_svg = false;
  for (const char* name : {"simulate", "stability", "bounds", "squire", "report"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker threads (default: MLA_THREADS or 1)")->check(CLI::PositiveNumber);
    sub->add_flag("--no-svg", no_svg, "skip SVG plots");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const std::string text = read_file(config_path);
    // A config may omit the command; the one on the command line is authoritative
    // and must agree when both are present.
    auto doc = nlohmann::json::parse(text, nullptr, false);
    std::string effective = text;
    if (!doc.is_discarded() && doc.is_object()) {
      if (!doc.contains("command")) {
        doc["command"] = command;
        effective = doc.dump();
      } else if (doc["command"].is_string() && doc["command"].get<std::string>() != command) {
        throw mla::ValidationError("config command '" + doc["command"].get<std::string>() +
                                   "' does not match the requested command '" + command + "'");
      }
    }
    auto cfg = mla::parse_config(effective);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    mla::RunOptions opts;
    opts.threads = threads > 0 ? threads : threads_from_env();
    opts.svg = !no_svg;
    const auto manifest = mla::run_command(cfg, opts);
    std::cout << "wrote " << manifest.files.size() << " files to " << cfg.output_dir.string() << "\n";
    return 0;
  } catch (const mla::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mla::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
