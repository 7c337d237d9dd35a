#pragma once

// Subcommands behind the `skypol` executable. Each returns a process exit code
// and writes human-readable text to `out` / diagnostics to `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skypol/scenarios.hpp"

namespace skypol {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

/// "start:stop:steps" with `steps` evenly spaced points, both ends included
/// (steps = 1 yields just start).
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  static GridSpec parse(const std::string& text);
  std::vector<double> points() const;
};

struct ChshOptions {
  std::filesystem::path config;
  /// "a,a',b,b'" in degrees; overrides the config's chsh section.
  std::optional<std::string> angles;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
};

struct ScanOptions {
  std::filesystem::path config;
  GridSpec grid_a;  // degrees
  GridSpec grid_b;  // degrees
  std::filesystem::path out;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
};

struct FitOptions {
  std::filesystem::path scan;
  std::optional<double> beta1_deg;
  std::optional<double> beta2_deg;
  std::optional<Scenario> scenario;
  std::optional<std::filesystem::path> out;
};

struct HbtOptions {
  std::filesystem::path config;
  GridSpec baseline;  // length units
  std::filesystem::path out;
  bool random_phases = false;
  std::optional<std::uint64_t> seed;
};

int cmd_chsh(const ChshOptions& opts, std::ostream& out, std::ostream& err);
int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_hbt(const HbtOptions& opts, std::ostream& out, std::ostream& err);

/// Detector positions moved symmetrically about their midpoint, along the
/// current A->B direction, to the given separation.
Geometry with_baseline(const Geometry& geom, double baseline);

}  // namespace skypol
