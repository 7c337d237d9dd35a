#include "skypol/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace skypol {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return {buf, res.ptr};
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << kScanCsvHeader << '\n';
  for (const ScanRow& r : scan.rows) {
    out << format_double(r.theta_a) << ',' << format_double(r.theta_b) << ',' << format_double(r.E) << ','
        << format_double(r.E_signal) << ',' << format_double(r.E_background) << ',' << format_double(r.w_signal)
        << ',' << format_double(r.w_background) << '\n';
  }
}

namespace {

double parse_field(const std::string& text, std::size_t line, std::size_t column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw SchemaError("scan CSV line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

ScanResult read_scan_csv(std::istream& in, Scenario scenario) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("scan CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScanCsvHeader) {
    throw SchemaError("scan CSV header mismatch: expected '" + std::string(kScanCsvHeader) + "', got '" + line + "'");
  }
  ScanResult scan;
  scan.scenario = scenario;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 7) {
      throw SchemaError("scan CSV line " + std::to_string(lineno) + ": expected 7 fields, got " +
                        std::to_string(fields.size()));
    }
    ScanRow r;
    double* slots[] = {&r.theta_a, &r.theta_b, &r.E, &r.E_signal, &r.E_background, &r.w_signal, &r.w_background};
    for (std::size_t c = 0; c < 7; ++c) *slots[c] = parse_field(fields[c], lineno, c + 1);
    scan.rows.push_back(r);
  }
  if (scan.rows.empty()) throw SchemaError("scan CSV has no data rows");
  return scan;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["tool"] = "skypol";
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config"] = m.config_path;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["outputs"] = m.outputs;
  j["timestamp"] = m.timestamp;
  if (m.scenario) j["scenario"] = to_string(*m.scenario);
  json args = json::object();
  for (const auto& [k, v] : m.arguments) args[k] = v;
  j["arguments"] = args;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.command = j.value("command", "");
    m.config_path = j.value("config", "");
    if (j.contains("seed") && j.at("seed").is_number_unsigned()) m.seed = j.at("seed").get<std::uint64_t>();
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.tool_version = j.value("tool_version", "");
    m.timestamp = j.value("timestamp", "");
    if (j.contains("scenario")) {
      const std::string s = j.at("scenario").get<std::string>();
      if (s == "I") {
        m.scenario = Scenario::I;
      } else if (s == "II") {
        m.scenario = Scenario::II;
      } else {
        throw SchemaError("manifest: unknown scenario '" + s + "'");
      }
    }
    if (j.contains("arguments")) {
      for (const auto& [k, v] : j.at("arguments").items()) m.arguments.emplace_back(k, v.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fit_report_to_json(const FitReport& rep, const std::vector<std::pair<std::string, std::string>>& extra) {
  json j;
  j["S_hat"] = rep.S_hat;
  j["B_hat"] = rep.B_hat;
  j["residual_rms"] = rep.residual_rms;
  j["bell_S"] = rep.bell_S;
  j["violates_bell"] = rep.violates_bell;
  j["S_stderr"] = rep.S_stderr;
  j["B_stderr"] = rep.B_stderr;
  for (const auto& [k, v] : extra) j[k] = v;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace skypol
