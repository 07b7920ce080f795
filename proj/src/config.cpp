#include "squeezenh/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "squeezenh/error.hpp"

namespace squeezenh {

using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"steady", ExperimentKind::steady},
      {"evolve", ExperimentKind::evolve},
      {"sweep", ExperimentKind::sweep},
      {"scaling-steady", ExperimentKind::scaling_steady},
      {"scaling-dynamic", ExperimentKind::scaling_dynamic},
      {"qfunc", ExperimentKind::qfunc},
      {"baselines", ExperimentKind::baselines},
  };
  return names;
}

const std::set<std::string> kCommonKeys{"kind",           "tol",      "workers", "frame",  "steady_rel_tol",
                                        "max_duration",   "per_decade", "out_dir", "format"};

std::set<std::string> kind_keys(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::steady:
      return {"N", "gamma_over_chi"};
    case ExperimentKind::evolve:
      return {"N", "gamma_over_chi", "duration"};
    case ExperimentKind::qfunc:
      return {"N", "gamma_over_chi", "duration", "q_times", "q_theta_points", "q_phi_points"};
    case ExperimentKind::sweep:
      return {"N", "gamma_grid", "mode"};
    case ExperimentKind::scaling_steady:
      return {"N_grid", "gamma_rule", "gamma_over_chi"};
    case ExperimentKind::scaling_dynamic:
      return {"N_grid", "gamma_rule", "gamma_over_chi"};
    case ExperimentKind::baselines:
      return {"N", "N_grid"};
  }
  return {};
}

template <class T>
T get_as(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

int get_int(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (v.is_number_integer()) return get_as<int>(doc, key);
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e9) return static_cast<int>(d);
  }
  throw ConfigError("config key '" + key + "' must be an integer");
}

double get_number(const json& doc, const std::string& key) {
  if (!doc.at(key).is_number()) throw ConfigError("config key '" + key + "' must be a number");
  const double v = doc.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError("config key '" + key + "' must be finite");
  return v;
}

std::vector<double> number_list(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("config key '" + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require_only(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

// {"from": a, "to": b, "count": n, "spacing": "linear" | "log"} or an explicit array.
std::vector<double> parse_gamma_grid(const json& doc) {
  const json& v = doc.at("gamma_grid");
  if (v.is_array()) return number_list(doc, "gamma_grid");
  if (!v.is_object()) throw ConfigError("gamma_grid must be an array or a range object");
  require_only(v, {"from", "to", "count", "spacing"}, "gamma_grid");
  for (const char* key : {"from", "to", "count"}) {
    if (!v.contains(key)) throw ConfigError(std::string("gamma_grid range needs '") + key + "'");
  }
  const double from = get_number(v, "from");
  const double to = get_number(v, "to");
  const int count = get_int(v, "count");
  const std::string spacing = v.contains("spacing") ? get_as<std::string>(v, "spacing") : "linear";
  if (count < 2) throw ConfigError("gamma_grid count must be at least 2");
  if (!(from > 0.0) || !(to > from)) throw ConfigError("gamma_grid needs 0 < from < to");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    if (spacing == "linear") {
      out[i] = from + f * (to - from);
    } else if (spacing == "log") {
      out[i] = from * std::pow(to / from, f);
    } else {
      throw ConfigError("gamma_grid spacing must be 'linear' or 'log'");
    }
  }
  return out;
}

// {"min": a, "max": b, "per_decade": k} gives round(a * 10^(i/k)) <= b, or an explicit array.
std::vector<int> parse_n_grid(const json& doc) {
  const json& v = doc.at("N_grid");
  std::vector<int> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw ConfigError("N_grid entries must be integers");
      out.push_back(v[i].get<int>());
    }
    return out;
  }
  if (!v.is_object()) throw ConfigError("N_grid must be an array or a range object");
  require_only(v, {"min", "max", "per_decade"}, "N_grid");
  const int lo = v.contains("min") ? get_int(v, "min") : 100;
  const int hi = v.contains("max") ? get_int(v, "max") : 3162;
  const int per = v.contains("per_decade") ? get_int(v, "per_decade") : 5;
  if (lo < 2 || hi < lo || per < 1) throw ConfigError("N_grid range needs 2 <= min <= max and per_decade >= 1");
  for (int i = 0;; ++i) {
    const int n = static_cast<int>(std::lround(lo * std::pow(10.0, static_cast<double>(i) / per)));
    if (n > hi) break;
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names()) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  const auto it = kind_names().find(name);
  if (it == kind_names().end()) throw ConfigError("unknown experiment kind '" + name + "'");
  return it->second;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains("kind")) throw ConfigError("config key 'kind' is required");
  ExperimentConfig c;
  c.kind = parse_kind(get_as<std::string>(doc, "kind"));
  const std::string kind_name = to_string(c.kind);
  std::set<std::string> allowed = kCommonKeys;
  for (const auto& k : kind_keys(c.kind)) allowed.insert(k);
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) {
      if (kCommonKeys.count(key) || key == "N" || key == "N_grid" || key == "gamma_over_chi" || key == "gamma_rule" ||
          key == "gamma_grid" || key == "duration" || key == "mode" || key.rfind("q_", 0) == 0) {
        throw ConfigError("key '" + key + "' does not apply to kind " + kind_name);
      }
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  auto need = [&](const char* key) {
    if (!doc.contains(key)) throw ConfigError(std::string("config key '") + key + "' is required for kind " + kind_name);
  };

  if (doc.contains("N")) {
    c.n_atoms = get_int(doc, "N");
    if (c.n_atoms < 2) throw ConfigError("N ≥ 2 required");
  }
  if (doc.contains("N_grid")) c.n_grid = parse_n_grid(doc);
  if (doc.contains("gamma_over_chi") && doc.contains("gamma_rule")) {
    throw ConfigError("give either gamma_over_chi or gamma_rule, not both");
  }
  if (doc.contains("gamma_over_chi")) c.gamma = GammaRule{GammaRule::Kind::fixed, get_number(doc, "gamma_over_chi")};
  if (doc.contains("gamma_rule")) c.gamma = GammaRule::parse(get_as<std::string>(doc, "gamma_rule"));
  if (doc.contains("gamma_grid")) c.gamma_grid = parse_gamma_grid(doc);
  if (doc.contains("mode")) {
    const auto mode = get_as<std::string>(doc, "mode");
    if (mode == "steady") {
      c.sweep_mode = SweepMode::steady;
    } else if (mode == "dynamic") {
      c.sweep_mode = SweepMode::dynamic;
    } else {
      throw ConfigError("mode must be 'steady' or 'dynamic'");
    }
  }
  if (doc.contains("duration")) c.duration = get_number(doc, "duration");
  if (doc.contains("q_times")) c.q_times = number_list(doc, "q_times");
  if (doc.contains("q_theta_points")) c.q_theta_points = get_int(doc, "q_theta_points");
  if (doc.contains("q_phi_points")) c.q_phi_points = get_int(doc, "q_phi_points");
  if (doc.contains("tol")) c.run.tol = get_number(doc, "tol");
  if (doc.contains("workers")) c.run.workers = get_int(doc, "workers");
  if (doc.contains("frame")) {
    const auto f = get_as<std::string>(doc, "frame");
    if (f == "twist") {
      c.run.frame = Frame::twist;
    } else if (f == "lab") {
      c.run.frame = Frame::lab;
    } else {
      throw ConfigError("frame must be 'twist' or 'lab'");
    }
  }
  if (doc.contains("steady_rel_tol")) c.run.steady_rel_tol = get_number(doc, "steady_rel_tol");
  if (doc.contains("max_duration")) c.run.max_duration = get_number(doc, "max_duration");
  if (doc.contains("per_decade")) c.run.per_decade = get_int(doc, "per_decade");
  if (doc.contains("out_dir")) c.out_dir = get_as<std::string>(doc, "out_dir");
  if (doc.contains("format")) {
    const auto f = get_as<std::string>(doc, "format");
    if (f == "csv") {
      c.format = OutputFormat::csv;
    } else if (f == "json") {
      c.format = OutputFormat::json;
    } else {
      throw ConfigError("format must be 'csv' or 'json'");
    }
  }

  switch (c.kind) {
    case ExperimentKind::steady:
    case ExperimentKind::evolve:
      need("N");
      need("gamma_over_chi");
      break;
    case ExperimentKind::qfunc:
      need("N");
      need("gamma_over_chi");
      need("q_times");
      break;
    case ExperimentKind::sweep:
      need("N");
      need("gamma_grid");
      break;
    case ExperimentKind::scaling_steady:
      if (!c.gamma) c.gamma = GammaRule::parse("1/(0.03N)");
      break;
    case ExperimentKind::scaling_dynamic:
      if (!c.gamma) throw ConfigError("kind scaling-dynamic needs gamma_over_chi or gamma_rule");
      break;
    case ExperimentKind::baselines:
      if (!doc.contains("N") && !doc.contains("N_grid")) throw ConfigError("kind baselines needs N or N_grid");
      if (doc.contains("N") && doc.contains("N_grid")) throw ConfigError("give either N or N_grid, not both");
      break;
  }
  if ((c.kind == ExperimentKind::scaling_steady || c.kind == ExperimentKind::scaling_dynamic) && c.n_grid.empty()) {
    c.n_grid = default_n_grid(3162);
  }
  if (c.kind == ExperimentKind::baselines && c.n_grid.empty()) c.n_grid = {c.n_atoms};
  validate(c);
  return c;
}

void validate(ExperimentConfig& c) {
  const bool uses_n = c.kind != ExperimentKind::scaling_steady && c.kind != ExperimentKind::scaling_dynamic &&
                      c.kind != ExperimentKind::baselines;
  if (uses_n && c.n_atoms < 2) throw ConfigError("N ≥ 2 required");
  for (int n : c.n_grid) {
    if (n < 4) throw ConfigError("N_grid values must be ≥ 4");
  }
  for (std::size_t i = 1; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("N_grid must be strictly ascending");
  }
  if (c.gamma) {
    if (c.gamma->kind == GammaRule::Kind::fixed && !(c.gamma->value >= 0.0)) throw ConfigError("gamma_over_chi ≥ 0 required");
    if (c.kind == ExperimentKind::steady && !(c.gamma->value > 0.0)) {
      throw ConfigError("kind steady needs gamma_over_chi > 0");
    }
  }
  for (double g : c.gamma_grid) {
    if (!(g > 0.0)) throw ConfigError("gamma_grid values must be positive");
  }
  if (!(c.duration > 0.0)) throw ConfigError("duration must be positive");
  for (double t : c.q_times) {
    if (!(t >= 0.0) || t > c.duration) throw ConfigError("q_times must lie in [0, duration]");
  }
  if (c.q_theta_points < 2 || c.q_phi_points < 2) throw ConfigError("Q grids need at least 2 points per axis");
  if (!(c.run.tol > 0.0) || c.run.tol > 1e-3) throw ConfigError("tol must lie in (0, 1e-3]");
  if (c.run.workers < 1) throw ConfigError("workers must be ≥ 1");
  if (!(c.run.steady_rel_tol > 0.0) || !(c.run.steady_rel_tol < 1.0)) throw ConfigError("steady_rel_tol must lie in (0, 1)");
  if (!(c.run.max_duration > 0.0)) throw ConfigError("max_duration must be positive");
  if (c.run.per_decade < 1) throw ConfigError("per_decade must be ≥ 1");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case ExperimentKind::steady:
    case ExperimentKind::evolve:
    case ExperimentKind::qfunc:
    case ExperimentKind::sweep:
      j["N"] = n_atoms;
      break;
    default:
      j["N_grid"] = n_grid;
      break;
  }
  if (gamma) {
    if (gamma->kind == GammaRule::Kind::fixed) {
      j["gamma_over_chi"] = gamma->value;
    } else {
      j["gamma_rule"] = gamma->describe();
    }
  }
  if (kind == ExperimentKind::sweep) {
    j["gamma_grid"] = gamma_grid;
    j["mode"] = sweep_mode == SweepMode::steady ? "steady" : "dynamic";
  }
  if (kind == ExperimentKind::evolve || kind == ExperimentKind::qfunc) j["duration"] = duration;
  if (kind == ExperimentKind::qfunc) {
    j["q_times"] = q_times;
    j["q_theta_points"] = q_theta_points;
    j["q_phi_points"] = q_phi_points;
  }
  // Worker count and output location do not change results and stay out of the hash.
  j["tol"] = run.tol;
  j["frame"] = run.frame == Frame::twist ? "twist" : "lab";
  j["steady_rel_tol"] = run.steady_rel_tol;
  j["max_duration"] = run.max_duration;
  j["per_decade"] = run.per_decade;
  return j;
}

std::string ExperimentConfig::hash() const {
  // 64-bit FNV-1a over the canonical (key-sorted) dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

}  // namespace squeezenh
