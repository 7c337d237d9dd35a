#pragma once

// Scan CSV files, fit reports and run manifests.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skypol/scenarios.hpp"

namespace skypol {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kScanCsvHeader = "theta_a,theta_b,E,E_signal,E_background,w_signal,w_background";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input does not follow the expected file layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

void write_scan_csv(std::ostream& out, const ScanResult& scan);
/// The scenario is not stored in the CSV; pass it from the manifest.
ScanResult read_scan_csv(std::istream& in, Scenario scenario);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;
  std::string timestamp;
  /// Scenario of the data the command produced, when meaningful.
  std::optional<Scenario> scenario;
  /// Remaining command-line settings as key/value strings.
  std::vector<std::pair<std::string, std::string>> arguments;
};

/// `<output>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

std::string fit_report_to_json(const FitReport& rep, const std::vector<std::pair<std::string, std::string>>& extra);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace skypol
