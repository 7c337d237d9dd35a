#pragma once

// Experiment configuration files.
//
// JSON document, schema_version 1. Angles are given in degrees and converted
// to radians on load; lengths are in arbitrary but consistent units.
//
//   {
//     "schema_version": 1,
//     "scenario": "II",                       // "I" or "II"
//     "bell_kind": 1,                         // 1 or 2
//     "entangled_fraction": 0.3,              // [0, 1]
//     "propagator_normalization": "phase-only",  // or "spherical"
//     "source_phases_deg": [0, 0],
//     "geometry": {
//       "source1": [x, y, z], "source2": [x, y, z],
//       "detector_a": [x, y, z], "detector_b": [x, y, z],
//       "wavenumber": 1.0
//     },
//     "background": {
//       "axis1_deg": 0, "axis2_deg": 0, "alpha1": 1, "alpha2": 1,
//       "weights": {"w12": 0.5, "w21": 0.5, "w11": 0, "w22": 0}
//     },
//     "chsh": {"a_deg": 0, "a_prime_deg": 45, "b_deg": 22.5, "b_prime_deg": -22.5},
//     "rng": {"seed": 1, "phase_mode": "auto"}   // auto | fixed | redraw
//   }
//
// Only schema_version and entangled_fraction are required. Unknown keys are
// rejected so that misspelled fields do not silently fall back to defaults.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "skypol/montecarlo.hpp"
#include "skypol/scenarios.hpp"

namespace skypol {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config error at '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunSettings {
  ExperimentConfig experiment;
  ChshConfiguration chsh = ChshConfiguration::bell_optimal();
  std::uint64_t seed = 1;
  PhaseMode phase_mode = PhaseMode::automatic;
};

RunSettings parse_config(const std::string& json_text);
RunSettings load_config(const std::filesystem::path& path);

/// Geometry used when the file has no geometry section: two sources 100 units
/// apart at distance 1000, detectors 10 units apart, k = 1.
Geometry default_geometry();

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace skypol
