#include "skypol/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace skypol {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(join(where, key), "unknown field");
  }
}

const json& object_at(const json& parent, const std::string& key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(join(where, key), "expected an object");
  return v;
}

double number_at(const json& parent, const std::string& key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_number()) throw ConfigError(join(where, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(where, key), "expected a finite number");
  return x;
}

double number_or(const json& parent, const std::string& key, const std::string& where, double fallback) {
  return parent.contains(key) ? number_at(parent, key, where) : fallback;
}

Vec3 vec3_at(const json& parent, const std::string& key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(join(where, key), "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) {
      throw ConfigError(join(where, key) + "[" + std::to_string(i) + "]", "expected a number");
    }
    out(i) = v[static_cast<std::size_t>(i)].get<double>();
  }
  if (!out.allFinite()) throw ConfigError(join(where, key), "coordinates must be finite");
  return out;
}

std::string string_at(const json& parent, const std::string& key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_string()) throw ConfigError(join(where, key), "expected a string");
  return v.get<std::string>();
}

Geometry parse_geometry(const json& g) {
  const std::string where = "geometry";
  reject_unknown(g, where, {"source1", "source2", "detector_a", "detector_b", "wavenumber"});
  Geometry geom = default_geometry();
  if (g.contains("source1")) geom.s1 = vec3_at(g, "source1", where);
  if (g.contains("source2")) geom.s2 = vec3_at(g, "source2", where);
  if (g.contains("detector_a")) geom.dA = vec3_at(g, "detector_a", where);
  if (g.contains("detector_b")) geom.dB = vec3_at(g, "detector_b", where);
  geom.k = number_or(g, "wavenumber", where, geom.k);
  if (!(geom.k > 0.0)) throw ConfigError("geometry.wavenumber", "must be > 0");
  try {
    geom.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
  return geom;
}

BackgroundSpec parse_background(const json& b) {
  const std::string where = "background";
  reject_unknown(b, where, {"axis1_deg", "axis2_deg", "alpha1", "alpha2", "weights"});
  BackgroundSpec spec;
  spec.axis1 = PolarizerAxis::from_degrees(number_or(b, "axis1_deg", where, 0.0));
  spec.axis2 = PolarizerAxis::from_degrees(number_or(b, "axis2_deg", where, 0.0));
  spec.alpha1 = number_or(b, "alpha1", where, 0.0);
  spec.alpha2 = number_or(b, "alpha2", where, 0.0);
  if (spec.alpha1 < 0.0) throw ConfigError("background.alpha1", "must be >= 0");
  if (spec.alpha2 < 0.0) throw ConfigError("background.alpha2", "must be >= 0");
  if (b.contains("weights")) {
    const json& w = object_at(b, "weights", where);
    const std::string ww = "background.weights";
    reject_unknown(w, ww, {"w12", "w21", "w11", "w22"});
    spec.weights.w12 = number_or(w, "w12", ww, 0.0);
    spec.weights.w21 = number_or(w, "w21", ww, 0.0);
    spec.weights.w11 = number_or(w, "w11", ww, 0.0);
    spec.weights.w22 = number_or(w, "w22", ww, 0.0);
    for (const auto& [name, value] : {std::pair{"w12", spec.weights.w12}, std::pair{"w21", spec.weights.w21},
                                      std::pair{"w11", spec.weights.w11}, std::pair{"w22", spec.weights.w22}}) {
      if (value < 0.0) throw ConfigError(ww + "." + name, "must be >= 0");
    }
    if (spec.weights.w12 + spec.weights.w21 + spec.weights.w11 + spec.weights.w22 <= 0.0) {
      throw ConfigError(ww, "weights must not all be zero");
    }
  }
  return spec;
}

ChshConfiguration parse_chsh(const json& c) {
  const std::string where = "chsh";
  reject_unknown(c, where, {"a_deg", "a_prime_deg", "b_deg", "b_prime_deg"});
  ChshConfiguration cfg = ChshConfiguration::bell_optimal();
  if (c.contains("a_deg")) cfg.a = PolarizerAxis::from_degrees(number_at(c, "a_deg", where));
  if (c.contains("a_prime_deg")) cfg.a_prime = PolarizerAxis::from_degrees(number_at(c, "a_prime_deg", where));
  if (c.contains("b_deg")) cfg.b = PolarizerAxis::from_degrees(number_at(c, "b_deg", where));
  if (c.contains("b_prime_deg")) cfg.b_prime = PolarizerAxis::from_degrees(number_at(c, "b_prime_deg", where));
  return cfg;
}

RunSettings parse_document(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(doc, "",
                 {"schema_version", "scenario", "bell_kind", "entangled_fraction", "propagator_normalization",
                  "source_phases_deg", "geometry", "background", "chsh", "rng"});

  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing required field");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }

  RunSettings rs;
  ExperimentConfig& cfg = rs.experiment;
  cfg.geometry = default_geometry();

  if (doc.contains("scenario")) {
    const std::string s = string_at(doc, "scenario", "");
    if (s == "I") {
      cfg.scenario = Scenario::I;
    } else if (s == "II") {
      cfg.scenario = Scenario::II;
    } else {
      throw ConfigError("scenario", "expected \"I\" or \"II\", got \"" + s + "\"");
    }
  }

  if (doc.contains("bell_kind")) {
    const json& k = doc.at("bell_kind");
    if (!k.is_number_integer() || (k.get<int>() != 1 && k.get<int>() != 2)) {
      throw ConfigError("bell_kind", "expected 1 or 2");
    }
    cfg.bell_kind = k.get<int>();
  }

  if (!doc.contains("entangled_fraction")) throw ConfigError("entangled_fraction", "missing required field");
  cfg.entangled_fraction = number_at(doc, "entangled_fraction", "");
  if (cfg.entangled_fraction < 0.0 || cfg.entangled_fraction > 1.0) {
    throw ConfigError("entangled_fraction", "must lie in [0, 1]");
  }

  if (doc.contains("propagator_normalization")) {
    const std::string n = string_at(doc, "propagator_normalization", "");
    if (n == "phase-only") {
      cfg.normalization = Normalization::phase_only;
    } else if (n == "spherical") {
      cfg.normalization = Normalization::spherical;
    } else {
      throw ConfigError("propagator_normalization", "expected \"phase-only\" or \"spherical\"");
    }
  }

  if (doc.contains("source_phases_deg")) {
    const json& p = doc.at("source_phases_deg");
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError("source_phases_deg", "expected an array of 2 numbers");
    }
    cfg.phi1 = deg_to_rad(p[0].get<double>());
    cfg.phi2 = deg_to_rad(p[1].get<double>());
  }

  if (doc.contains("geometry")) cfg.geometry = parse_geometry(object_at(doc, "geometry", ""));
  if (doc.contains("background")) cfg.background = parse_background(object_at(doc, "background", ""));
  if (doc.contains("chsh")) rs.chsh = parse_chsh(object_at(doc, "chsh", ""));

  if (doc.contains("rng")) {
    const json& r = object_at(doc, "rng", "");
    reject_unknown(r, "rng", {"seed", "phase_mode"});
    if (r.contains("seed")) {
      if (!r.at("seed").is_number_unsigned()) throw ConfigError("rng.seed", "expected a nonnegative integer");
      rs.seed = r.at("seed").get<std::uint64_t>();
    }
    if (r.contains("phase_mode")) {
      const std::string m = string_at(r, "phase_mode", "rng");
      if (m == "auto") {
        rs.phase_mode = PhaseMode::automatic;
      } else if (m == "fixed") {
        rs.phase_mode = PhaseMode::fixed;
      } else if (m == "redraw") {
        rs.phase_mode = PhaseMode::redraw;
      } else {
        throw ConfigError("rng.phase_mode", "expected \"auto\", \"fixed\" or \"redraw\"");
      }
    }
  }

  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError("<root>", e.what());
  }
  return rs;
}

}  // namespace

Geometry default_geometry() {
  Geometry g;
  g.s1 = Vec3(-50.0, 0.0, 1000.0);
  g.s2 = Vec3(50.0, 0.0, 1000.0);
  g.dA = Vec3(-5.0, 0.0, 0.0);
  g.dB = Vec3(5.0, 0.0, 0.0);
  g.k = 1.0;
  return g;
}

RunSettings parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_document(doc);
}

RunSettings load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace skypol
