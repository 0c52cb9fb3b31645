#include "pnpqkd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pnpqkd/errors.hpp"

namespace pnpqkd {

using json = nlohmann::json;

namespace {

/// Collects field-level problems while walking the document.
struct Issues {
  std::vector<std::string> list;

  void add(const std::string& path, const std::string& msg) {
    list.push_back(path + ": " + msg);
  }
  void raise_if_any() {
    if (!list.empty()) throw ConfigError(std::move(list));
  }
};

/// Typed view over one JSON object that tracks consumed keys; anything
/// left over is reported as an unknown key (typo protection for physics
/// parameters).
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path, Issues& issues)
      : node_(node), path_(std::move(path)), issues_(issues) {
    if (!node_.is_object()) issues_.add(path_, "must be a JSON object");
  }

  bool has(const char* key) const {
    return node_.is_object() && node_.contains(key);
  }

  const json* take(const char* key) {
    if (!node_.is_object()) return nullptr;
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  template <typename T>
  bool read(const char* key, T& out, bool required = false) {
    const json* val = take(key);
    if (!val) {
      if (required) issues_.add(field(key), "missing required key");
      return false;
    }
    return convert(*val, key, out);
  }

  std::string field(const char* key) const { return path_ + "." + key; }

  void finish() {
    if (!node_.is_object()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.contains(it.key()))
        issues_.add(path_ + "." + it.key(), "unknown key");
  }

  const json& node() const { return node_; }
  Issues& issues() { return issues_; }
  const std::string& path() const { return path_; }

 private:
  template <typename T>
  bool convert(const json& val, const char* key, T& out) {
    if constexpr (std::is_same_v<T, double>) {
      if (!val.is_number()) {
        issues_.add(field(key), "must be a number");
        return false;
      }
      out = val.get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!val.is_boolean()) {
        issues_.add(field(key), "must be a boolean");
        return false;
      }
      out = val.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!val.is_string()) {
        issues_.add(field(key), "must be a string");
        return false;
      }
      out = val.get<std::string>();
    } else {
      if (!val.is_number_integer() && !val.is_number_unsigned()) {
        issues_.add(field(key), "must be an integer");
        return false;
      }
      out = val.get<T>();
    }
    return true;
  }

  const json& node_;
  std::string path_;
  Issues& issues_;
  std::set<std::string> seen_;
};

std::vector<double> read_mu_list(ObjectReader& session, const char* key,
                                 bool required) {
  std::vector<double> values;
  const json* val = session.take(key);
  if (!val) {
    if (required) session.issues().add(session.field(key), "missing required key");
    return values;
  }
  auto check = [&](const json& v, const std::string& path) {
    if (!v.is_number() || !(v.get<double>() >= 0.0)) {
      session.issues().add(path, "must be a number >= 0");
      return;
    }
    values.push_back(v.get<double>());
  };
  if (val->is_array()) {
    if (val->empty())
      session.issues().add(session.field(key), "must not be empty");
    for (std::size_t i = 0; i < val->size(); ++i)
      check((*val)[i], session.field(key) + "[" + std::to_string(i) + "]");
  } else {
    check(*val, session.field(key));
  }
  return values;
}

void read_session(ObjectReader& root, SimulatorConfig& config, Issues& issues) {
  const json* node = root.take("session");
  if (!node) {
    issues.add("session", "missing required key");
    return;
  }
  ObjectReader session(*node, "session", issues);

  config.mu_a_values = read_mu_list(session, "mu", true);
  if (session.has("mu_b")) {
    config.mu_b_values = read_mu_list(session, "mu_b", false);
    if (config.mu_b_values.size() != config.mu_a_values.size())
      issues.add("session.mu_b", "must match the length of session.mu");
  } else {
    config.mu_b_values = config.mu_a_values;
  }

  session.read("xi", config.session.xi);
  if (const json* det = session.take("detector")) {
    ObjectReader detector(*det, "session.detector", issues);
    detector.read("efficiency", config.session.detector.efficiency);
    detector.read("dark_prob", config.session.detector.dark_prob);
    detector.finish();
  }
  session.read("misalignment_rad", config.session.misalignment_rad);
  session.read("n_trials", config.session.n_trials);
  if (const json* bp = session.take("basis_probs")) {
    ObjectReader probs(*bp, "session.basis_probs", issues);
    probs.read("z", config.session.basis_probs.z);
    probs.read("x", config.session.basis_probs.x);
    probs.finish();
  }
  session.read("eq2_as_printed", config.session.eq2_as_printed);
  session.read("phase_nodes", config.session.phase_nodes);
  session.read("fixed_polarizations", config.fixed_polarizations);
  session.read("blocks", config.blocks);

  if (const json* settings = session.take("intensity_settings")) {
    if (!settings->is_array() || settings->empty()) {
      issues.add("session.intensity_settings", "must be a nonempty array");
    } else {
      config.session.intensity_settings.clear();
      for (std::size_t i = 0; i < settings->size(); ++i) {
        const std::string path =
            "session.intensity_settings[" + std::to_string(i) + "]";
        ObjectReader entry((*settings)[i], path, issues);
        IntensitySetting setting;
        entry.read("label", setting.label, true);
        entry.read("attenuation", setting.attenuation, true);
        entry.read("prob", setting.prob, true);
        entry.finish();
        config.session.intensity_settings.push_back(std::move(setting));
      }
    }
  }
  session.finish();
}

void read_scan(ObjectReader& root, SimulatorConfig& config, Issues& issues) {
  const json* node = root.take("scan");
  if (!node) return;
  ObjectReader scan(*node, "scan", issues);
  ScanSettings settings;
  scan.read("points", settings.points);
  scan.read("start", settings.start);
  scan.read("stop", settings.stop);
  scan.read("trials_per_point", settings.trials_per_point);
  scan.read("sync", settings.sync);
  scan.read("blocks", settings.blocks);
  scan.read("hwp1_angle_rad", settings.hwp1_angle_rad);
  scan.finish();
  if (settings.points < 1) issues.add("scan.points", "must be >= 1");
  if (!(settings.stop > settings.start))
    issues.add("scan.stop", "must be greater than scan.start");
  if (settings.blocks < 1) issues.add("scan.blocks", "must be >= 1");
  if (settings.trials_per_point < 1)
    issues.add("scan.trials_per_point", "must be >= 1");
  config.scan = settings;
}

void read_faraday(ObjectReader& root, SimulatorConfig& config, Issues& issues) {
  const json* node = root.take("faraday");
  if (!node) return;
  ObjectReader faraday(*node, "faraday", issues);
  faraday.read("samples", config.faraday.samples);
  faraday.finish();
  if (config.faraday.samples < 1) issues.add("faraday.samples", "must be >= 1");
}

SimulatorConfig parse_document(const json& doc) {
  Issues issues;
  SimulatorConfig config;
  ObjectReader root(doc, "$", issues);

  root.read("schema_version", config.schema_version, true);
  if (config.schema_version != 1)
    issues.add("$.schema_version", "unsupported schema version (expected 1)");
  root.read("seed", config.seed);

  std::string engine;
  if (root.read("engine", engine)) {
    if (engine == "analytic")
      config.engine = EngineKind::Analytic;
    else if (engine == "mc")
      config.engine = EngineKind::MonteCarlo;
    else
      issues.add("$.engine", "must be \"analytic\" or \"mc\"");
  }

  read_session(root, config, issues);
  read_scan(root, config, issues);
  read_faraday(root, config, issues);
  root.finish();

  config.session.rng_seed = config.seed;
  config.session.engine = config.engine;
  if (!config.mu_a_values.empty()) {
    config.session.mu_a = config.mu_a_values.front();
    config.session.mu_b = config.mu_b_values.front();
  }
  for (const std::string& msg : config.session.validate())
    issues.add("session", msg);

  issues.raise_if_any();
  return config;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return doc;
}

}  // namespace

std::vector<double> ScanSettings::grid() const {
  std::vector<double> g;
  g.reserve(points);
  if (points == 1) {
    g.push_back(start);
    return g;
  }
  // `points` samples on [start, stop); phase scans cover a full period
  // without duplicating the wrap-around point.
  const double step = (stop - start) / points;
  for (int i = 0; i < points; ++i) g.push_back(start + i * step);
  return g;
}

SessionConfig SimulatorConfig::session_for(std::size_t i) const {
  SessionConfig s = session;
  s.mu_a = mu_a_values.at(i);
  s.mu_b = mu_b_values.at(i);
  return s;
}

SimulatorConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_document(doc);
}

SimulatorConfig load_config(const std::string& path) {
  return parse_document(parse_json_file(path));
}

std::string canonical_config_text(const std::string& path) {
  // nlohmann stores objects as sorted maps, so dump() is already canonical
  // under key reordering in the source file.
  return parse_json_file(path).dump();
}

}  // namespace pnpqkd
