#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "mla/cli_io.hpp"
#include "mla/dim_bounds.hpp"
#include "mla/dynamics.hpp"
#include "mla/squire3d.hpp"

namespace mla {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::stability: return "stability";
    case Command::bounds: return "bounds";
    case Command::squire: return "squire";
    case Command::report: return "report";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::simulate, Command::stability, Command::bounds, Command::squire, Command::report}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown command '" + name + "' (expected simulate, stability, bounds, squire or report)");
}

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid configuration (" << errors.size() << (errors.size() == 1 ? " error)" : " errors)");
  for (const auto& e : errors) os << "\n  " << e;
  return os.str();
}

using Check = std::function<std::optional<std::string>(double)>;

Check positive() {
  return [](double v) -> std::optional<std::string> {
    if (v > 0.0) return std::nullopt;
    return "must be > 0";
  };
}
Check nonnegative() {
  return [](double v) -> std::optional<std::string> {
    if (v >= 0.0) return std::nullopt;
    return "must be >= 0";
  };
}
Check at_least(double lo) {
  return [lo](double v) -> std::optional<std::string> {
    if (v >= lo) return std::nullopt;
    std::ostringstream os;
    os << "must be >= " << lo;
    return os.str();
  };
}
Check open_interval(double lo, double hi) {
  return [lo, hi](double v) -> std::optional<std::string> {
    if (v > lo && v < hi) return std::nullopt;
    std::ostringstream os;
    os << "must lie in (" << lo << ", " << hi << ")";
    return os.str();
  };
}
Check half_open(double lo, double hi) {
  return [lo, hi](double v) -> std::optional<std::string> {
    if (v > lo && v <= hi) return std::nullopt;
    std::ostringstream os;
    os << "must lie in (" << lo << ", " << hi << "]";
    return os.str();
  };
}

/// Reads typed fields from one JSON object, collecting every problem.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  void number(const char* key, double& out, const Check& check = {}) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number()) return type_error(key, "a number");
    apply(key, v->get<double>(), out, check);
  }

  void optional_number(const char* key, std::optional<double>& out, const Check& check = {}) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    if (!v->is_number()) return type_error(key, "a number or null");
    double tmp = 0.0;
    if (apply(key, v->get<double>(), tmp, check)) out = tmp;
  }

  void integer(const char* key, int& out, const Check& check = {}) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer()) return type_error(key, "an integer");
    const auto raw = v->get<long long>();
    if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max()) {
      return error(key, "is out of range");
    }
    double tmp = 0.0;
    if (apply(key, static_cast<double>(raw), tmp, check)) out = static_cast<int>(raw);
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
      return type_error(key, "a non-negative integer");
    }
    out = v->get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) return type_error(key, "a boolean");
    out = v->get<bool>();
  }

  void choice(const char* key, std::string& out, std::initializer_list<const char*> allowed) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string()) return type_error(key, "a string");
    const auto s = v->get<std::string>();
    for (const char* a : allowed) {
      if (s == a) {
        out = s;
        return;
      }
    }
    std::ostringstream os;
    os << "must be one of";
    for (const char* a : allowed) os << " '" << a << "'";
    os << " (got '" << s << "')";
    error(key, os.str());
  }

  void string(const char* key, std::string& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string() || v->get<std::string>().empty()) return type_error(key, "a non-empty string");
    out = v->get<std::string>();
  }

  template <class T>
  void list(const char* key, std::vector<T>& out, const Check& check = {}, bool allow_empty = false) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) return type_error(key, "an array");
    std::vector<T> tmp;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string item = std::string(key) + "[" + std::to_string(i) + "]";
      const bool type_ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
      if (!type_ok) {
        type_error(item.c_str(), std::is_integral_v<T> ? "an integer" : "a number");
        ok = false;
        continue;
      }
      const double d = e.get<double>();
      if (check) {
        if (auto msg = check(d)) {
          error(item.c_str(), *msg + describe(d));
          ok = false;
          continue;
        }
      }
      tmp.push_back(e.get<T>());
    }
    if (!allow_empty && v->empty()) {
      error(key, "must not be empty");
      ok = false;
    }
    if (ok) out = std::move(tmp);
  }

  /// Reports keys that no reader asked for.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) errors_.push_back(field(it.key().c_str()) + ": unknown key");
    }
  }

  void error(const char* key, const std::string& msg) { errors_.push_back(field(key) + ": " + msg); }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  static std::string describe(double v) {
    std::ostringstream os;
    os << " (got " << v << ")";
    return os.str();
  }
  void type_error(const char* key, const char* what) { error(key, std::string("must be ") + what); }
  bool apply(const char* key, double v, double& out, const Check& check) {
    if (!std::isfinite(v)) {
      error(key, "must be finite");
      return false;
    }
    if (check) {
      if (auto msg = check(v)) {
        error(key, *msg + describe(v));
        return false;
      }
    }
    out = v;
    return true;
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_params(Reader& r, SimulateParams& p) {
  r.number("nu", p.nu, positive());
  r.number("alpha", p.alpha, nonnegative());
  r.integer("n_modes", p.n_modes, at_least(8));
  r.number("dealias_fraction", p.dealias_fraction, half_open(0.0, 1.0));
  r.integer("s", p.s, at_least(1));
  r.number("lambda", p.lambda, nonnegative());
  r.number("dt", p.dt, positive());
  r.number("t_final", p.t_final, nonnegative());
  r.integer("sample_every", p.sample_every, at_least(1));
  r.choice("initial", p.initial, {"perturbation", "stationary"});
  r.number("perturbation_amplitude", p.perturbation_amplitude, nonnegative());
  r.integer("perturbation_kmax", p.perturbation_kmax, at_least(1));
  r.number("courant", p.courant, positive());
  r.boolean("enforce_cfl", p.enforce_cfl);
  r.number("tail_fraction", p.tail_fraction, half_open(0.0, 1.0));
}

void read_params(Reader& r, StabilityParams& p) {
  r.integer("s", p.s, at_least(1));
  r.number("delta", p.delta, open_interval(0.0, kDeltaMax));
  r.number("alpha", p.alpha, nonnegative());
  r.number("nu", p.nu, positive());
  r.optional_number("lambda", p.lambda, positive());
  r.number("lambda_factor", p.lambda_factor, positive());
  r.boolean("compute_lambda0", p.compute_lambda0);
  r.integer("max_n_trunc", p.max_n_trunc, at_least(64));
  r.integer("curve_points", p.curve_points, at_least(2));
  r.list("scaling_s", p.scaling_s, at_least(1), true);
  r.integer("dense_cutoff", p.dense_cutoff, nonnegative());
}

void read_params(Reader& r, BoundsParams& p) {
  r.list("g_values", p.g_values, positive());
  r.list("alpha_values", p.alpha_values, nonnegative());
  r.number("lambda1", p.lambda1, positive());
  r.number("l_const", p.l_const, positive());
  r.number("eps_g", p.eps_g, nonnegative());
  r.number("gamma", p.gamma, open_interval(0.0, 1.0));
}

void read_params(Reader& r, SquireParams& p) {
  r.integer("s", p.s, at_least(1));
  r.number("delta", p.delta, open_interval(0.0, kDeltaMax));
  r.number("alpha", p.alpha, nonnegative());
  r.number("nu", p.nu, positive());
  r.optional_number("lambda", p.lambda, positive());
  r.choice("triples", p.triples, {"admissible", "window"});
  r.integer("max_triples", p.max_triples, at_least(1));
  r.number("c2", p.c2, positive());
  r.number("c3", p.c3, positive());
  r.number("c4", p.c4, positive());
  r.number("delta_star", p.delta_star, open_interval(0.0, kDeltaMax));
  r.list("count_s", p.count_s, at_least(1));
  r.number("gamma", p.gamma, half_open(0.0, 1.0));
  r.optional_number("c6", p.c6, positive());
  r.number("c8", p.c8, positive());
  r.list("a0_b_values", p.a0_b_values, {}, true);
  r.integer("a0_k_cutoff", p.a0_k_cutoff, at_least(1));
}

void read_params(Reader& r, ReportParams& p) {
  r.number("g", p.g, positive());
  r.number("alpha", p.alpha, nonnegative());
  r.number("lambda1", p.lambda1, positive());
  r.number("l_const", p.l_const, positive());
  r.number("eps_g", p.eps_g, nonnegative());
  r.number("gamma", p.gamma, open_interval(0.0, 1.0));
  r.number("delta_star", p.delta_star, open_interval(0.0, kDeltaMax));
  r.number("c6", p.c6, positive());
  r.number("c8", p.c8, positive());
}

/// Checks that need several fields or a module constructor.
void cross_validate(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  auto guard = [&](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errors.push_back(path + ": " + e.what());
    }
  };
  switch (cfg.command) {
    case Command::simulate: {
      const auto& p = cfg.simulate;
      guard("parameters.n_modes", [&] {
        const SpectralGrid grid(p.n_modes, p.dealias_fraction);
        if (p.s > grid.cutoff()) {
          std::ostringstream os;
          os << "forcing wavenumber s=" << p.s << " exceeds the dealiasing cutoff " << grid.cutoff();
          throw ValidationError(os.str());
        }
        if (p.perturbation_kmax > grid.cutoff() && p.initial == "perturbation") {
          throw ValidationError("perturbation_kmax exceeds the dealiasing cutoff");
        }
      });
      if (p.dt > p.t_final && p.t_final > 0.0) errors.push_back("parameters.dt: must not exceed t_final");
      break;
    }
    case Command::stability: {
      const auto& p = cfg.stability;
      if (p.dense_cutoff != 0 && p.dense_cutoff < 3 * p.s) {
        errors.push_back("parameters.dense_cutoff: must be 0 or >= 3 s");
      }
      break;
    }
    case Command::bounds: break;
    case Command::squire: {
      const auto& p = cfg.squire;
      guard("parameters", [&] { CountWindow::make(p.c2, p.c3, p.c4, p.delta_star); });
      break;
    }
    case Command::report: break;
  }
}

json params_json(const SimulateParams& p) {
  return {{"nu", p.nu},
          {"alpha", p.alpha},
          {"n_modes", p.n_modes},
          {"dealias_fraction", p.dealias_fraction},
          {"s", p.s},
          {"lambda", p.lambda},
          {"dt", p.dt},
          {"t_final", p.t_final},
          {"sample_every", p.sample_every},
          {"initial", p.initial},
          {"perturbation_amplitude", p.perturbation_amplitude},
          {"perturbation_kmax", p.perturbation_kmax},
          {"courant", p.courant},
          {"enforce_cfl", p.enforce_cfl},
          {"tail_fraction", p.tail_fraction}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json params_json(const StabilityParams& p) {
  return {{"s", p.s},
          {"delta", p.delta},
          {"alpha", p.alpha},
          {"nu", p.nu},
          {"lambda", optional_json(p.lambda)},
          {"lambda_factor", p.lambda_factor},
          {"compute_lambda0", p.compute_lambda0},
          {"max_n_trunc", p.max_n_trunc},
          {"curve_points", p.curve_points},
          {"scaling_s", p.scaling_s},
          {"dense_cutoff", p.dense_cutoff}};
}

json params_json(const BoundsParams& p) {
  return {{"g_values", p.g_values}, {"alpha_values", p.alpha_values}, {"lambda1", p.lambda1},
          {"l_const", p.l_const},   {"eps_g", p.eps_g},               {"gamma", p.gamma}};
}

json params_json(const SquireParams& p) {
  return {{"s", p.s},
          {"delta", p.delta},
          {"alpha", p.alpha},
          {"nu", p.nu},
          {"lambda", optional_json(p.lambda)},
          {"triples", p.triples},
          {"max_triples", p.max_triples},
          {"c2", p.c2},
          {"c3", p.c3},
          {"c4", p.c4},
          {"delta_star", p.delta_star},
          {"count_s", p.count_s},
          {"gamma", p.gamma},
          {"c6", optional_json(p.c6)},
          {"c8", p.c8},
          {"a0_b_values", p.a0_b_values},
          {"a0_k_cutoff", p.a0_k_cutoff}};
}

json params_json(const ReportParams& p) {
  return {{"g", p.g},         {"alpha", p.alpha}, {"lambda1", p.lambda1},
          {"l_const", p.l_const}, {"eps_g", p.eps_g}, {"gamma", p.gamma},
          {"delta_star", p.delta_star}, {"c6", p.c6}, {"c8", p.c8}};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : ValidationError(join_errors(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a 1-based line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError({os.str()});
  }
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});

  std::vector<std::string> errors;
  ExperimentConfig cfg;
  Reader top(doc, "", errors);

  std::string command;
  top.string("command", command);
  if (command.empty()) {
    if (!doc.contains("command")) errors.push_back("command: required");
  } else {
    try {
      cfg.command = command_from_string(command);
    } catch (const ValidationError& e) {
      errors.push_back(std::string("command: ") + e.what());
      command.clear();
    }
  }
  std::string out_dir = cfg.output_dir.string();
  top.string("output_dir", out_dir);
  cfg.output_dir = out_dir;
  top.unsigned64("seed", cfg.seed);

  static const json empty = json::object();
  const json* params = &empty;
  if (auto it = doc.find("parameters"); it != doc.end()) {
    if (it->is_object()) {
      params = &*it;
    } else {
      errors.push_back("parameters: must be an object");
    }
  }
  if (!command.empty()) {
    Reader r(*params, "parameters", errors);
    switch (cfg.command) {
      case Command::simulate: read_params(r, cfg.simulate); break;
      case Command::stability: read_params(r, cfg.stability); break;
      case Command::bounds: read_params(r, cfg.bounds); break;
      case Command::squire: read_params(r, cfg.squire); break;
      case Command::report: read_params(r, cfg.report); break;
    }
    r.finish();
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    if (k != "command" && k != "output_dir" && k != "seed" && k != "parameters") {
      errors.push_back(k + ": unknown key");
    }
  }
  if (errors.empty()) cross_validate(cfg, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json params;
  switch (cfg.command) {
    case Command::simulate: params = params_json(cfg.simulate); break;
    case Command::stability: params = params_json(cfg.stability); break;
    case Command::bounds: params = params_json(cfg.bounds); break;
    case Command::squire: params = params_json(cfg.squire); break;
    case Command::report: params = params_json(cfg.report); break;
  }
  return {{"command", to_string(cfg.command)},
          {"output_dir", cfg.output_dir.string()},
          {"seed", cfg.seed},
          {"parameters", params}};
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

}  // namespace mla
