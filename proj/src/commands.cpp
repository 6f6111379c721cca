#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "mla/cli_io.hpp"
#include "mla/dim_bounds.hpp"
#include "mla/dynamics.hpp"
#include "mla/field_io.hpp"
#include "mla/parallel.hpp"
#include "mla/squire3d.hpp"
#include "mla/stability2d.hpp"

namespace mla {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Empty cell for missing values, shortest round-trip text otherwise.
std::string cell(double x) { return std::isnan(x) ? std::string() : format_number(x); }
std::string cell(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json number_or_null(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& file, const std::string& header) : out_(file) {
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fields, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
  return out;
}

// --- simulate -------------------------------------------------------------------

json run_simulate(const ExperimentConfig& cfg, const RunOptions&, json& tolerances) {
  const auto& p = cfg.simulate;
  const fs::path& dir = cfg.output_dir;
  ModelParams params{p.nu, p.alpha, SpectralGrid(p.n_modes, p.dealias_fraction)};
  params.validate();
  const ForcingSpec forcing{p.s, p.lambda};
  const auto f = kolmogorov_forcing(forcing, params);
  const auto fv = kolmogorov_velocity_forcing(forcing, params);
  const double f_l2 = std::hypot(norms(fv.u1).l2, norms(fv.u2).l2);

  SolverState state{p.initial == "stationary" ? stationary_psi(forcing, params)
                                              : initial_perturbation(params.grid, cfg.seed, p.perturbation_amplitude,
                                                                     p.perturbation_kmax),
                    0.0, params};
  StepOptions step;
  step.courant = p.courant;
  step.enforce_cfl = p.enforce_cfl;
  const auto diag = run(state, p.t_final, p.dt, f, p.sample_every, step);

  {
    CsvWriter csv(dir / "diagnostics.csv", "time,phi_l2,grad_phi_l2,avg_grad_sq");
    for (const auto& s : diag.samples) {
      csv.row(format_number(s.time), format_number(s.phi_l2), format_number(s.grad_phi_l2), format_number(s.avg_grad_sq));
    }
  }
  {
    std::ofstream out(dir / "final_psi.json");
    out << serialize_field(state.psi) << '\n';
  }
  const auto rep = check_asymptotic_bounds(diag, f_l2, p.nu, kLambda1Torus, p.tail_fraction);
  auto check_json = [](const BoundCheck& b) {
    return json{{"measured", b.measured}, {"bound", b.bound}, {"margin", b.margin}, {"holds", b.holds}};
  };
  double drift = 0.0;
  if (!diag.samples.empty()) {
    const double ref = diag.samples.front().phi_l2;
    for (const auto& s : diag.samples) drift = std::max(drift, std::abs(s.phi_l2 - ref));
    if (ref > 0.0) drift /= ref;
  }
  tolerances["courant"] = p.courant;
  tolerances["enforce_cfl"] = p.enforce_cfl;
  tolerances["dealias_fraction"] = p.dealias_fraction;
  tolerances["tail_fraction"] = p.tail_fraction;
  json summary = {{"grashof", grashof(forcing)},
                  {"f_l2", f_l2},
                  {"samples", diag.samples.size()},
                  {"final_time", state.time},
                  {"dealias_cutoff", params.grid.cutoff()},
                  {"seed", cfg.seed},
                  {"phi_l2_relative_drift", drift},
                  {"tail_start_time", rep.tail_start_time},
                  {"tail_samples", rep.tail_samples},
                  {"phi_sq_bound", check_json(rep.phi_sq)},
                  {"avg_grad_sq_bound", check_json(rep.avg_grad_sq)},
                  {"note", rep.note}};
  write_json(dir / "summary.json", summary);
  return summary;
}

// --- stability ------------------------------------------------------------------

struct PairRow {
  int t = 0;
  int r = 0;
  bool in_region = false;
  double sigma = kNaN;
  double lambda0 = kNaN;
  std::string error;
};

json run_stability(const ExperimentConfig& cfg, const RunOptions& opt, json& tolerances) {
  const auto& p = cfg.stability;
  const fs::path& dir = cfg.output_dir;
  const auto spec = RegionSpec::make(p.delta, p.s);
  const double lambda = p.lambda ? *p.lambda : p.lambda_factor * lambda0_interval_in_lambda(p.s, p.alpha, p.delta).upper;
  const double cap = capital_lambda(lambda, p.s, p.alpha);
  RecurrenceOptions ropt;
  ropt.max_n_trunc = p.max_n_trunc;

  // Candidate box around A(delta); rows outside the region carry in_region = 0.
  std::vector<PairRow> rows;
  const int t_max = static_cast<int>(std::floor(p.s * kDeltaMax));
  const int r_max = p.s / 6;
  for (int t = 1; t <= t_max; ++t) {
    for (int r = -r_max; r <= r_max; ++r) rows.push_back({t, r, region_contains(spec, t, r), kNaN, kNaN, {}});
  }
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      row.sigma = leading_real_sigma(RecurrenceProblem::make(p.s, row.t, row.r, cap, p.alpha), ropt).sigma_hat;
      if (row.in_region && p.compute_lambda0) {
        row.lambda0 = lambda0_threshold(p.s, row.t, row.r, p.alpha, p.delta, 1e-8, ropt);
      }
    } catch (const ValidationError& e) {
      row.error = e.what();
    } catch (const NumericalError& e) {
      if (row.in_region) throw;
      row.error = e.what();
    }
  });

  {
    CsvWriter csv(dir / "sweep.csv", "s,t,r,alpha,delta,lambda,capital_lambda,sigma_hat,lambda0,in_region");
    for (const auto& r : rows) {
      csv.row(p.s, r.t, r.r, format_number(p.alpha), format_number(p.delta), format_number(lambda), format_number(cap),
              cell(r.sigma), cell(r.lambda0), r.in_region ? 1 : 0);
    }
  }

  const auto iv = lambda0_interval(p.s, p.alpha, p.delta);
  const PairRow* first = nullptr;
  for (const auto& r : rows) {
    if (r.in_region) {
      first = &r;
      break;
    }
  }

  PlotData curve{PlotKind::sigma_vs_lambda, {}};
  PlotData spectrum{PlotKind::spectrum, {}};
  if (first) {
    const auto grid = log_grid(iv.lower / 2.0, iv.upper * 2.0, p.curve_points);
    PlotSeries s{"t=" + std::to_string(first->t) + " r=" + std::to_string(first->r), grid, std::vector<double>(grid.size())};
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
      s.y[i] = leading_real_sigma(RecurrenceProblem::make(p.s, first->t, first->r, grid[i], p.alpha), ropt).sigma_hat;
    });
    curve.series.push_back(std::move(s));

    PlotSeries rec{"recurrence", {}, {}};
    for (const auto& z : chain_spectrum(RecurrenceProblem::make(p.s, first->t, first->r, cap, p.alpha))) {
      rec.x.push_back(z.real());
      rec.y.push_back(z.imag());
    }
    spectrum.series.push_back(std::move(rec));
  }
  if (p.dense_cutoff > 0) {
    const auto dense = full_linearization_spectrum(p.s, lambda, p.nu, p.alpha, p.dense_cutoff);
    PlotSeries ds{"dense", {}, {}};
    for (const auto& z : dense.sigma_hat) {
      ds.x.push_back(z.real());
      ds.y.push_back(z.imag());
    }
    spectrum.series.push_back(std::move(ds));
  }
  emit_plot_data(curve, dir, "sigma_vs_lambda", opt.svg);
  emit_plot_data(spectrum, dir, "spectrum", opt.svg);

  const double area = region_area(p.delta);
  PlotData scaling{PlotKind::lattice_scaling, {}};
  PlotSeries ds{"d(s)/s^2", {}, {}}, as{"a(delta)", {}, {}};
  for (int s : p.scaling_s) {
    ds.x.push_back(s);
    ds.y.push_back(double(count_lattice(RegionSpec::make(p.delta, s))) / (double(s) * s));
    as.x.push_back(s);
    as.y.push_back(area);
  }
  scaling.series = {ds, as};
  emit_plot_data(scaling, dir, "lattice_scaling", opt.svg);

  const auto opt_delta = optimize_delta();
  const double g = lambda * p.s * p.s;
  const auto lb = lower_bound_dim2d(g, p.alpha, opt_delta.delta_star);
  const long long d_s = count_lattice(spec);
  int unstable = 0, inside = 0;
  for (const auto& r : rows) {
    if (!r.in_region) continue;
    if (r.sigma > 0.0) ++unstable;
    if (!std::isnan(r.lambda0) && r.lambda0 > iv.lower && r.lambda0 < iv.upper) ++inside;
  }
  tolerances["recurrence_reality_tol"] = ropt.reality_tol;
  tolerances["recurrence_tail_tol"] = ropt.tail_tol;
  tolerances["recurrence_convergence_tol"] = ropt.convergence_tol;
  tolerances["lambda0_rel_tol"] = 1e-8;

  json summary = {{"s", p.s},
                  {"delta", p.delta},
                  {"alpha", p.alpha},
                  {"nu", p.nu},
                  {"lambda", lambda},
                  {"capital_lambda", cap},
                  {"grashof", g},
                  {"d_s", d_s},
                  {"dimension_estimate", 2 * d_s},
                  {"a_delta", area},
                  {"delta_star", opt_delta.delta_star},
                  {"area_moment_max", opt_delta.value},
                  {"unstable_pairs", unstable},
                  {"lambda0_inside_interval", inside},
                  {"lambda0_interval", {iv.lower, iv.upper}},
                  {"lower_bound_2d",
                   {{"value", lb.value},
                    {"coefficient", lb.coefficient},
                    {"small_alpha_regime", lb.small_alpha_regime},
                    {"regime_consistent", lb.regime_consistent},
                    {"note", lb.note}}}};
  if (p.alpha == 0.0) {
    const auto iv0 = lambda0_interval_inviscid_filter(p.s, p.delta);
    summary["lambda0_interval_alpha0"] = {iv0.lower, iv0.upper};
  }
  json failures = json::array();
  for (const auto& r : rows) {
    if (!r.error.empty()) failures.push_back({{"t", r.t}, {"r", r.r}, {"error", r.error}});
  }
  summary["skipped_pairs"] = failures;
  write_json(dir / "summary.json", summary);
  return summary;
}

// --- bounds ---------------------------------------------------------------------

json run_bounds(const ExperimentConfig& cfg, const RunOptions& opt, json&) {
  const auto& p = cfg.bounds;
  const fs::path& dir = cfg.output_dir;
  std::vector<TwoSidedReport> reps(p.g_values.size() * p.alpha_values.size());
  parallel_for(reps.size(), opt.threads, [&](std::size_t i) {
    BoundInputs in;
    in.g = p.g_values[i / p.alpha_values.size()];
    in.alpha = p.alpha_values[i % p.alpha_values.size()];
    in.lambda1 = p.lambda1;
    in.l_const = p.l_const;
    in.eps_g = p.eps_g;
    in.gamma = p.gamma;
    in.validate();
    reps[i] = two_sided_report(in);
  });
  bool consistent = true;
  json notes = json::array();
  {
    CsvWriter csv(dir / "bounds.csv", "g,alpha,upper1,upper2,lower,ratio");
    for (const auto& r : reps) {
      csv.row(format_number(r.g), format_number(r.alpha), cell(r.upper1), cell(r.upper2), format_number(r.lower),
              cell(r.ratio));
      consistent = consistent && r.consistent;
      if (!r.notes.empty()) notes.push_back({{"g", r.g}, {"alpha", r.alpha}, {"note", r.notes}});
    }
  }
  PlotData plot{PlotKind::bounds_vs_g, {}};
  for (std::size_t a = 0; a < p.alpha_values.size(); ++a) {
    std::ostringstream tag;
    tag << "alpha=" << p.alpha_values[a];
    PlotSeries up{"upper " + tag.str(), {}, {}}, lo{"lower " + tag.str(), {}, {}};
    for (std::size_t gi = 0; gi < p.g_values.size(); ++gi) {
      const auto& r = reps[gi * p.alpha_values.size() + a];
      if (r.upper) {
        up.x.push_back(r.g);
        up.y.push_back(*r.upper);
      }
      lo.x.push_back(r.g);
      lo.y.push_back(r.lower);
    }
    plot.series.push_back(std::move(up));
    plot.series.push_back(std::move(lo));
  }
  emit_plot_data(plot, dir, "bounds_vs_g", opt.svg);
  json summary = {{"rows", reps.size()}, {"lower_le_upper", consistent}, {"notes", notes}};
  write_json(dir / "summary.json", summary);
  return summary;
}

// --- squire ---------------------------------------------------------------------

struct TripleRow {
  SquireTriple triple;
  std::optional<LiftResult> lift;
  bool covered = false;
};

json run_squire(const ExperimentConfig& cfg, const RunOptions& opt, json& tolerances) {
  const auto& p = cfg.squire;
  const fs::path& dir = cfg.output_dir;
  const auto window = CountWindow::make(p.c2, p.c3, p.c4, p.delta_star);
  const double lambda = p.lambda ? *p.lambda : lambda3_threshold(p.s, p.alpha, p.delta);
  const auto setup = build_3d_setup(p.s, lambda, p.nu, p.alpha);

  std::vector<SquireTriple> triples;
  if (p.triples == "admissible") {
    triples = admissible_triples(p.s, p.delta, static_cast<std::size_t>(p.max_triples));
  } else {
    triples = window_triples(p.s, window);
    if (triples.size() > static_cast<std::size_t>(p.max_triples)) triples.resize(p.max_triples);
  }
  std::vector<TripleRow> rows(triples.size());
  const LiftOptions lopt;
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    rows[i].triple = triples[i];
    rows[i].lift = lift_unstable_mode(triples[i], setup, lopt);
    rows[i].covered = lambda3_covers_triple(triples[i], p.s, p.alpha, p.delta);
  });

  json lifted = json::array();
  double worst_residual = 0.0, worst_div = 0.0;
  {
    CsvWriter csv(dir / "triples.csv", "s,a,b,r,a_hat,sigma_hat,residual");
    for (const auto& row : rows) {
      const auto& t = row.triple;
      const double sig = row.lift ? row.lift->sigma_hat : kNaN;
      const double res = row.lift ? row.lift->residual.max_momentum() : kNaN;
      csv.row(p.s, t.a, t.b, t.r, format_number(t.a_hat()), cell(sig), cell(res));
      json item = {{"a", t.a}, {"b", t.b}, {"r", t.r}, {"lambda3_covers", row.covered}};
      if (row.lift) {
        worst_residual = std::max(worst_residual, res);
        worst_div = std::max(worst_div, row.lift->residual.divergence);
        item["growth_rate"] = row.lift->growth_rate;
        item["capital_lambda_eff"] = row.lift->capital_lambda_eff;
        item["divergence_residual"] = row.lift->residual.divergence;
      } else {
        item["growth_rate"] = nullptr;
      }
      lifted.push_back(item);
    }
  }

  std::vector<TripleCount> counts(p.count_s.size());
  parallel_for(counts.size(), opt.threads, [&](std::size_t i) { counts[i] = count_triples(p.count_s[i], window); });
  {
    CsvWriter csv(dir / "count_scaling.csv", "s,count,c5_fit");
    for (std::size_t i = 0; i < counts.size(); ++i) csv.row(p.count_s[i], counts[i].count, format_number(counts[i].c5_fit));
  }
  std::size_t last = 0;
  for (std::size_t i = 1; i < p.count_s.size(); ++i) {
    if (p.count_s[i] > p.count_s[last]) last = i;
  }
  const TripleCount& ref = counts[last];

  std::vector<LinearSpectrum3D> a0(p.a0_b_values.size());
  parallel_for(a0.size(), opt.threads, [&](std::size_t i) {
    a0[i] = a0_stability_spectrum(p.a0_b_values[i], p.s, lambda, p.nu, p.alpha, p.a0_k_cutoff);
  });
  PlotData spec{PlotKind::spectrum, {}};
  json a0_summary = json::array();
  {
    CsvWriter csv(dir / "a0_spectrum.csv", "b,re,im");
    for (std::size_t i = 0; i < a0.size(); ++i) {
      PlotSeries s{"b=" + std::to_string(p.a0_b_values[i]), {}, {}};
      for (const auto& z : a0[i].growth) {
        csv.row(p.a0_b_values[i], format_number(z.real()), format_number(z.imag()));
        s.x.push_back(z.real());
        s.y.push_back(z.imag());
      }
      spec.series.push_back(std::move(s));
      a0_summary.push_back({{"b", p.a0_b_values[i]},
                            {"max_growth", number_or_null(a0[i].max_growth)},
                            {"max_pressure_ratio", a0[i].max_pressure_ratio}});
    }
  }
  emit_plot_data(spec, dir, "a0_spectrum", opt.svg);

  const double c6 = p.c6 ? *p.c6 : ref.c5_fit;
  json lower3d = nullptr;
  json upper3d = nullptr;
  if (p.alpha > 0.0) {
    const auto lb = lower_bound_dim3d(setup.grashof, p.alpha, p.gamma, c6);
    lower3d = {{"value", lb.value}, {"mode_count", lb.mode_count}, {"c6", c6}, {"gamma", p.gamma}, {"note", lb.note}};
    upper3d = {{"value", upper_bound_dim3d(setup.grashof, p.alpha, p.c8)}, {"c8", p.c8}};
  }
  tolerances["lift_tail_tol"] = lopt.tail_tol;
  tolerances["omega2_solve_residual"] = 1e-10;
  tolerances["a0_growth_threshold"] = 1e-10;

  json summary = {{"s", p.s},
                  {"lambda", lambda},
                  {"nu", p.nu},
                  {"alpha", p.alpha},
                  {"grashof", setup.grashof},
                  {"f_norm", setup.f_norm},
                  {"f_norm_t3", setup.f_norm_t3},
                  {"count", ref.count},
                  {"count_s", p.count_s[last]},
                  {"c5_fit", ref.c5_fit},
                  {"c5_quarter", ref.c5_quarter},
                  {"c5_sector", ref.c5_sector},
                  {"lower_bound_3d", lower3d},
                  {"upper_bound_3d", upper3d},
                  {"max_lift_residual", worst_residual},
                  {"max_divergence_residual", worst_div},
                  {"triples", lifted},
                  {"a0", a0_summary}};
  if (p.alpha == 0.0) summary["lower_bound_3d_note"] = "the 3-D lower bound needs alpha > 0";
  write_json(dir / "summary.json", summary);
  return summary;
}

// --- report ---------------------------------------------------------------------

json run_report(const ExperimentConfig& cfg, const RunOptions&, json&) {
  const auto& p = cfg.report;
  const fs::path& dir = cfg.output_dir;
  BoundInputs in;
  in.g = p.g;
  in.alpha = p.alpha;
  in.lambda1 = p.lambda1;
  in.l_const = p.l_const;
  in.eps_g = p.eps_g;
  in.gamma = p.gamma;
  in.validate();
  const auto two = two_sided_report(in);
  const auto lb2 = lower_bound_dim2d(p.g, p.alpha, p.delta_star);
  json out = {{"g", p.g},
              {"alpha", p.alpha},
              {"upper1", number_or_null(two.upper1)},
              {"upper2", number_or_null(two.upper2)},
              {"upper", number_or_null(two.upper)},
              {"lower", two.lower},
              {"ratio", number_or_null(two.ratio)},
              {"consistent", two.consistent},
              {"notes", two.notes},
              {"lower_bound_2d",
               {{"value", lb2.value},
                {"coefficient", lb2.coefficient},
                {"regime_consistent", lb2.regime_consistent},
                {"note", lb2.note}}}};
  std::ostringstream txt;
  txt << "G = " << p.g << ", alpha = " << p.alpha << "\n";
  txt << "2-D lower bound: " << lb2.value << " (coefficient " << lb2.coefficient << ")\n";
  if (two.upper) txt << "2-D upper bound: " << *two.upper << "\n";
  if (!two.notes.empty()) txt << "notes: " << two.notes << "\n";
  if (p.alpha > 0.0) {
    const auto lb3 = lower_bound_dim3d(p.g, p.alpha, p.gamma, p.c6);
    const double ub3 = upper_bound_dim3d(p.g, p.alpha, p.c8);
    out["lower_bound_3d"] = {{"value", lb3.value}, {"mode_count", lb3.mode_count}, {"note", lb3.note}};
    out["upper_bound_3d"] = ub3;
    txt << "3-D lower bound (c6 = " << p.c6 << "): " << lb3.value << "\n";
    txt << "3-D upper bound (c8 = " << p.c8 << "): " << ub3 << "\n";
  }
  write_json(dir / "report.json", out);
  std::ofstream(dir / "report.txt") << txt.str();
  return out;
}

std::vector<ManifestFile> collect_files(const fs::path& dir) {
  std::vector<ManifestFile> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    out.push_back({rel, sha256_file(entry.path()), entry.file_size()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return out;
}

}  // namespace

RunManifest run_command(const ExperimentConfig& cfg, const RunOptions& options) {
  RunManifest m;
  m.config = config_to_json(cfg);
  m.code_version = MLA_VERSION;
  m.threads = std::max(1, options.threads);
  m.started_utc = utc_now();
  m.tolerances = json::object();
  fs::create_directories(cfg.output_dir);

  std::exception_ptr failure;
  try {
    switch (cfg.command) {
      case Command::simulate: run_simulate(cfg, options, m.tolerances); break;
      case Command::stability: run_stability(cfg, options, m.tolerances); break;
      case Command::bounds: run_bounds(cfg, options, m.tolerances); break;
      case Command::squire: run_squire(cfg, options, m.tolerances); break;
      case Command::report: run_report(cfg, options, m.tolerances); break;
    }
  } catch (const ValidationError& e) {
    m.ok = false;
    m.error_kind = "validation";
    m.error = e.what();
    failure = std::current_exception();
  } catch (const NumericalError& e) {
    m.ok = false;
    m.error_kind = "numerical";
    m.error = e.what();
    failure = std::current_exception();
  } catch (const std::exception& e) {
    m.ok = false;
    m.error_kind = "runtime";
    m.error = e.what();
    failure = std::current_exception();
  }
  m.finished_utc = utc_now();
  m.files = collect_files(cfg.output_dir);
  write_json(cfg.output_dir / "manifest.json", manifest_to_json(m));
  if (failure) std::rethrow_exception(failure);
  return m;
}

}  // namespace mla
