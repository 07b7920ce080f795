#include "squeezenh/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "squeezenh/error.hpp"
#include "squeezenh/evolution.hpp"
#include "squeezenh/husimi.hpp"
#include "squeezenh/power_law.hpp"
#include "squeezenh/squeezing.hpp"

namespace squeezenh {

namespace {

const Column kN{"N", "1"};
const Column kGamma{"gamma_over_chi", "1"};

double db_or_zero(double xi2) { return xi2 > 0.0 ? to_db(xi2) : 0.0; }

OutputTable steady_table(int n_atoms, const SteadyPoint& p) {
  OutputTable t("steady", 1,
                {kN, kGamma, {"xi2", "1"}, {"xi2_db", "dB"}, {"alpha_min", "rad"}, {"eigenvalue_re", "chi"},
                 {"eigenvalue_im", "chi"}, {"scaled_residual", "1"}});
  t.add_row({static_cast<double>(n_atoms), p.gamma_over_chi, p.xi2, to_db(p.xi2), p.alpha_min, p.eigenvalue.real(),
             p.eigenvalue.imag(), p.residual});
  return t;
}

std::vector<OutputTable> run_sweep(const ExperimentConfig& c) {
  std::vector<OutputTable> out;
  if (c.sweep_mode == SweepMode::steady) {
    const SteadySweep sweep = run_steady_sweep(c.n_atoms, c.gamma_grid, c.run);
    OutputTable t("steady_sweep", 1,
                  {kGamma, {"xi2", "1"}, {"alpha_min", "rad"}, {"eigenvalue_re", "chi"}, {"eigenvalue_im", "chi"}});
    for (const auto& p : sweep.points) {
      t.add_row({p.gamma_over_chi, p.xi2, p.alpha_min, p.eigenvalue.real(), p.eigenvalue.imag()});
    }
    out.push_back(std::move(t));
    OutputTable m("sweep_markers", 1, {{"marker", "1"}, kGamma, {"resolution", "1"}});
    m.add_row({1.0, sweep.markers.gamma_at_minimum, sweep.markers.resolution});
    for (double g : sweep.markers.tact_crossings) m.add_row({2.0, g, sweep.markers.resolution});
    for (double g : sweep.ambiguous) m.add_row({3.0, g, 0.0});
    out.push_back(std::move(m));
    out.push_back(baselines_table({c.n_atoms}, {sweep.oat}, {sweep.tact}));
  } else {
    const DynamicSweep sweep = run_gamma_sweep_dynamic(c.n_atoms, c.gamma_grid, c.run);
    OutputTable t("dynamic_sweep", 1,
                  {kGamma, {"xi2_min", "1"}, {"xi2_db", "dB"}, {"t_min", "1/chi"}, {"p", "1"}, {"log10_p", "1"},
                   {"total_time", "1/chi"}, {"log10_total_time", "1"}, {"alpha_min", "rad"}, {"steady_xi2", "1"},
                   {"steady_limited", "1"}});
    for (const auto& r : sweep.rows) {
      ScalingRow row;
      row.t = r.t_min;
      row.log_p = r.log_p;
      t.add_row({r.gamma_over_chi, r.xi2_min, to_db(r.xi2_min), r.t_min, row.p(), row.log10_p(), row.total_time(),
                 row.log10_total_time(), r.alpha_min, r.steady_xi2, r.steady_limited ? 1.0 : 0.0});
    }
    out.push_back(std::move(t));
    out.push_back(baselines_table({c.n_atoms}, {sweep.oat}, {sweep.tact}));
  }
  return out;
}

std::vector<OutputTable> run_qfunc(const ExperimentConfig& c) {
  EvolutionRequest req;
  req.n_atoms = c.n_atoms;
  req.gamma_over_chi = c.gamma->value;
  req.duration = c.duration;
  req.q_times = c.q_times;
  req.q_theta_points = c.q_theta_points;
  req.q_phi_points = c.q_phi_points;
  const EvolutionRun run = run_evolution(req, c.run);
  OutputTable q("qfunc", 1, {{"t", "1/chi"}, {"theta", "rad"}, {"phi", "rad"}, {"q", "1"}});
  OutputTable axes("qfunc_axes", 1,
                   {{"t", "1/chi"}, {"alpha_min", "rad"}, {"q_axis_angle", "rad"}, {"q_normalization", "1"}});
  for (const auto& snap : run.snapshots) {
    for (std::size_t i = 0; i < snap.grid.theta.size(); ++i) {
      for (std::size_t j = 0; j < snap.grid.phi.size(); ++j) {
        q.add_row({snap.t, snap.grid.theta[i], snap.grid.phi[j], snap.grid.at(i, j)});
      }
    }
    axes.add_row({snap.t, snap.alpha_min, snap.q_axis_angle, q_normalization(snap.grid)});
  }
  return {std::move(q), std::move(axes)};
}

std::vector<OutputTable> dispatch(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::steady:
      return {steady_table(c.n_atoms, steady_point(ModelParams{c.n_atoms, 1.0, c.gamma->value}, c.run))};
    case ExperimentKind::evolve: {
      EvolutionRequest req;
      req.n_atoms = c.n_atoms;
      req.gamma_over_chi = c.gamma->value;
      req.duration = c.duration;
      return {trace_table(run_evolution(req, c.run).trace)};
    }
    case ExperimentKind::qfunc:
      return run_qfunc(c);
    case ExperimentKind::sweep:
      return run_sweep(c);
    case ExperimentKind::scaling_steady: {
      const ScalingStudy s = run_scaling_steady(c.n_grid, *c.gamma, c.run);
      return {scaling_table(s), fits_table(s)};
    }
    case ExperimentKind::scaling_dynamic: {
      if (c.gamma->kind != GammaRule::Kind::fixed) {
        throw ConfigError("scaling-dynamic needs a fixed gamma_over_chi");
      }
      const ScalingStudy s = run_scaling_dynamic(c.n_grid, c.gamma->value, c.run);
      return {scaling_table(s), fits_table(s)};
    }
    case ExperimentKind::baselines: {
      std::vector<Baseline> oat, tact;
      for (int n : c.n_grid) {
        oat.push_back(baseline_oat(n, c.run));
        tact.push_back(baseline_tact(n, c.run));
      }
      return {baselines_table(c.n_grid, oat, tact)};
    }
  }
  return {};
}

void emit(const std::vector<OutputTable>& tables, const std::string& out_dir, OutputFormat format, std::ostream& out) {
  const char* ext = format == OutputFormat::csv ? ".csv" : ".json";
  if (out_dir.empty()) {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (i) out << '\n';
      if (format == OutputFormat::csv) {
        write_csv(tables[i], out);
      } else {
        write_json(tables[i], out);
      }
    }
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  for (const auto& t : tables) {
    const std::string path = (std::filesystem::path(out_dir) / (t.schema() + ext)).string();
    if (format == OutputFormat::csv) {
      write_csv(t, path);
    } else {
      write_json(t, path);
    }
    out << path << '\n';
  }
}

struct Overrides {
  std::string config;
  std::string out_dir;
  std::optional<int> n;
  std::optional<double> gamma;
  std::optional<double> duration;
  std::optional<double> tol;
  std::optional<int> workers;
  std::string format;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "Directory for output tables (default: stdout)");
  sub->add_option("--n", o.n, "Number of atoms N");
  sub->add_option("--gamma-over-chi", o.gamma, "Decay rate gamma/chi");
  sub->add_option("--duration", o.duration, "Evolution time chi*t");
  sub->add_option("--tol", o.tol, "Propagation error per unit chi*t");
  sub->add_option("--workers", o.workers, "Worker threads for grid experiments")->envname("SQUEEZENH_WORKERS");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

nlohmann::json config_document(const std::string& kind, const Overrides& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot open config file '" + o.config + "'");
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (doc.contains("kind") && doc["kind"] != kind) {
      throw ConfigError("config kind '" + doc["kind"].dump() + "' does not match subcommand " + kind);
    }
  }
  doc["kind"] = kind;
  if (o.n) doc["N"] = *o.n;
  if (o.gamma) {
    doc.erase("gamma_rule");
    doc["gamma_over_chi"] = *o.gamma;
  }
  if (o.duration) doc["duration"] = *o.duration;
  if (o.tol) doc["tol"] = *o.tol;
  if (o.workers) doc["workers"] = *o.workers;
  if (!o.format.empty()) doc["format"] = o.format;
  if (!o.out_dir.empty()) doc["out_dir"] = o.out_dir;
  return doc;
}

int run_fit(const std::string& in_path, const std::string& x, const std::string& y, const Overrides& o,
            std::ostream& out) {
  OutputTable input = [&] {
    try {
      return read_csv(in_path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }();
  std::vector<double> xs, ys;
  try {
    xs = input.column(x);
    ys = input.column(y);
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  const PowerLawFit fit = fit_power_law(xs, ys);
  OutputTable t("fit", 1, {{"amplitude", "1"}, {"exponent", "1"}, {"rms_residual", "log10"}, {"points", "1"}});
  t.add_row({fit.amplitude, fit.exponent, fit.rms_residual, static_cast<double>(xs.size())});
  t.set_provenance("code_version", kCodeVersion);
  t.set_provenance("source", std::filesystem::path(in_path).filename().string() + ":" + x + "," + y);
  emit({t}, o.out_dir, o.format == "json" ? OutputFormat::json : OutputFormat::csv, out);
  return 0;
}

}  // namespace

OutputTable trace_table(const EvolutionTrace& trace) {
  OutputTable t("trace", 1,
                {{"t", "1/chi"}, {"xi2", "1"}, {"xi2_db", "dB"}, {"alpha_min", "rad"}, {"p", "1"}, {"log_p", "1"},
                 {"jx_mean", "1"}, {"jy_mean", "1"}, {"jz_mean", "1"}});
  for (const auto& s : trace.samples) {
    t.add_row({s.t, s.xi2, db_or_zero(s.xi2), s.alpha_min, s.p, s.log_p, s.jx_mean, s.jy_mean, s.jz_mean});
  }
  return t;
}

OutputTable scaling_table(const ScalingStudy& study) {
  OutputTable t("scaling", 1,
                {kN, kGamma, {"xi2", "1"}, {"xi2_db", "dB"}, {"alpha_min", "rad"}, {"t", "1/chi"}, {"p", "1"},
                 {"log10_p", "1"}, {"total_time", "1/chi"}, {"log10_total_time", "1"}});
  for (const auto& r : study.rows) {
    const double total = r.total_time();
    if (!std::isfinite(total)) {
      throw NumericalError("P underflows at N = " + std::to_string(r.n_atoms) + "; only log10 columns are meaningful");
    }
    t.add_row({static_cast<double>(r.n_atoms), r.gamma_over_chi, r.xi2, to_db(r.xi2), r.alpha_min, r.t, r.p(),
               r.log10_p(), total, r.log10_total_time()});
  }
  return t;
}

OutputTable fits_table(const ScalingStudy& study) {
  OutputTable t("fits", 1,
                {{"quantity", "1"}, {"amplitude", "1"}, {"exponent", "1"}, {"rms_residual", "log10"}, {"points", "1"}});
  if (study.rows.size() < 3) return t;
  const double points = static_cast<double>(study.rows.size());
  t.add_row({1.0, study.xi2_fit.amplitude, study.xi2_fit.exponent, study.xi2_fit.rms_residual, points});
  if (study.t_fit) t.add_row({2.0, study.t_fit->amplitude, study.t_fit->exponent, study.t_fit->rms_residual, points});
  return t;
}

OutputTable baselines_table(const std::vector<int>& n_values, const std::vector<Baseline>& oat,
                            const std::vector<Baseline>& tact) {
  OutputTable t("baselines", 1,
                {kN, {"oat_xi2", "1"}, {"oat_xi2_db", "dB"}, {"oat_t", "1/chi"}, {"oat_xi2_asymptotic", "1"},
                 {"oat_t_asymptotic", "1/chi"}, {"tact_xi2", "1"}, {"tact_xi2_db", "dB"}, {"tact_t", "1/chi"},
                 {"tact_xi2_asymptotic", "1"}, {"tact_t_asymptotic", "1/chi"}});
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    t.add_row({static_cast<double>(n_values[i]), oat[i].xi2_min, to_db(oat[i].xi2_min), oat[i].t_min,
               oat[i].xi2_asymptotic, oat[i].t_asymptotic, tact[i].xi2_min, to_db(tact[i].xi2_min), tact[i].t_min,
               tact[i].xi2_asymptotic, tact[i].t_asymptotic});
  }
  return t;
}

std::vector<OutputTable> run_experiment(const ExperimentConfig& config) {
  std::vector<OutputTable> tables = dispatch(config);
  const std::string hash = config.hash();
  for (auto& t : tables) {
    t.set_provenance("config_hash", hash);
    t.set_provenance("code_version", kCodeVersion);
    t.set_provenance("kind", to_string(config.kind));
  }
  return tables;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional (no-jump) one-axis-twisting spin squeezing simulator", "squeezenh"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::pair<CLI::App*, std::string>> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"steady", "Steady state (slowest-decaying eigenstate) squeezing"},
      {"evolve", "Squeezing, survival probability and mean spin along a trajectory"},
      {"sweep", "Steady or dynamic optimum over a gamma/chi grid"},
      {"scaling-steady", "Steady-state squeezing, t_s and P versus N"},
      {"scaling-dynamic", "Dynamic optimum versus N at fixed gamma/chi"},
      {"qfunc", "Husimi Q snapshots along a trajectory"},
      {"baselines", "Hermitian one-axis and two-axis twisting optima"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    subs.emplace_back(sub, name);
  }
  std::string fit_in, fit_x, fit_y;
  CLI::App* fit = app.add_subcommand("fit", "Power-law fit y = a x^b of two columns of a CSV table");
  fit->add_option("--in", fit_in, "Input CSV table")->required();
  fit->add_option("--x", fit_x, "Column used as x")->required();
  fit->add_option("--y", fit_y, "Column used as y")->required();
  fit->add_option("--out", o.out_dir, "Directory for the output table (default: stdout)");
  fit->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (fit->parsed()) return run_fit(fit_in, fit_x, fit_y, o, out);
    for (const auto& [sub, name] : subs) {
      if (!sub->parsed()) continue;
      const ExperimentConfig config = parse_config(config_document(name, o));
      emit(run_experiment(config), config.out_dir, config.format, out);
      return 0;
    }
    err << app.help();
    return 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace squeezenh
