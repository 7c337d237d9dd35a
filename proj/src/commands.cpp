#include "skypol/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "skypol/config.hpp"
#include "skypol/io.hpp"
#include "skypol/montecarlo.hpp"

namespace skypol {

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FitError& e) {
    err << "error: fit failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "error: numerical: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    err << "error: numerical: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SchemaError& e) {
    err << "error: input schema: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

std::string fixed6(double x) {
  if (std::abs(x) < 5e-7) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

ChshConfiguration parse_angles(const std::string& text) {
  std::vector<double> deg;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      deg.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--angles", "not a number: '" + item + "'");
    }
  }
  if (deg.size() != 4) throw ConfigError("--angles", "expected 4 comma-separated angles a,a',b,b' in degrees");
  return {PolarizerAxis::from_degrees(deg[0]), PolarizerAxis::from_degrees(deg[1]),
          PolarizerAxis::from_degrees(deg[2]), PolarizerAxis::from_degrees(deg[3])};
}

std::vector<double> to_radians(const std::vector<double>& deg) {
  std::vector<double> out;
  out.reserve(deg.size());
  for (double d : deg) out.push_back(deg_to_rad(d));
  return out;
}

std::string grid_text(const GridSpec& g) {
  return format_double(g.start) + ":" + format_double(g.stop) + ":" + std::to_string(g.steps);
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError("grid", "expected start:stop:steps, got '" + text + "'");
  try {
    std::size_t used = 0;
    g.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    g.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    const long long steps = std::stoll(parts[2], &used);
    if (used != parts[2].size() || steps < 1) throw std::invalid_argument(parts[2]);
    g.steps = static_cast<std::size_t>(steps);
  } catch (const std::exception&) {
    throw ConfigError("grid", "expected numeric start:stop:steps with steps >= 1, got '" + text + "'");
  }
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ConfigError("grid", "bounds must be finite");
  return g;
}

std::vector<double> GridSpec::points() const {
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    out[i] = steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return out;
}

Geometry with_baseline(const Geometry& geom, double baseline) {
  const Vec3 mid = 0.5 * (geom.dA + geom.dB);
  Vec3 axis = geom.dB - geom.dA;
  axis = axis.norm() > 0.0 ? Vec3(axis.normalized()) : Vec3::UnitX();
  Geometry g = geom;
  g.dA = mid - 0.5 * baseline * axis;
  g.dB = mid + 0.5 * baseline * axis;
  return g;
}

int cmd_chsh(const ChshOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunSettings rs = load_config(opts.config);
    const ChshConfiguration c = opts.angles ? parse_angles(*opts.angles) : rs.chsh;
    const double s = chsh_with_background(rs.experiment, c);
    out << "S = " << fixed6(s) << " (analytic)\n";
    out << "bell violation: " << (std::abs(s) > 2.0 ? "yes" : "no") << " (|S| > 2)\n";
    if (const auto fc = critical_fraction(rs.experiment, c)) {
      out << "critical entangled fraction = " << fixed6(*fc) << '\n';
    }
    if (opts.n) {
      if (*opts.n == 0) throw ConfigError("--n", "must be > 0");
      const std::uint64_t seed = opts.seed.value_or(rs.seed);
      SamplerOptions so;
      so.workers = opts.workers;
      so.phase_mode = rs.phase_mode;
      const ChshEstimate est = estimate_chsh(rs.experiment, c, *opts.n, seed, so);
      out << "S = " << fixed6(est.S_hat) << " +/- " << fixed6(est.std_err) << " (Monte Carlo, n = " << *opts.n
          << " per setting, seed = " << seed << ")\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunSettings rs = load_config(opts.config);
    const auto ga = to_radians(opts.grid_a.points());
    const auto gb = to_radians(opts.grid_b.points());
    const std::uint64_t seed = opts.seed.value_or(rs.seed);

    ScanResult scan;
    if (opts.n) {
      if (*opts.n == 0) throw ConfigError("--n", "must be > 0");
      SamplerOptions so;
      so.workers = opts.workers;
      so.phase_mode = rs.phase_mode;
      scan = monte_carlo_scan(rs.experiment, ga, gb, *opts.n, seed, so);
    } else {
      scan = angular_scan(rs.experiment, ga, gb);
    }

    std::ostringstream csv;
    write_scan_csv(csv, scan);
    write_text_file(opts.out, csv.str());

    RunManifest m;
    m.command = "scan";
    m.config_path = opts.config.string();
    if (opts.n) m.seed = seed;
    m.outputs = {opts.out.string()};
    m.timestamp = utc_timestamp();
    m.scenario = scan.scenario;
    m.arguments = {{"grid_a_deg", grid_text(opts.grid_a)},
                   {"grid_b_deg", grid_text(opts.grid_b)},
                   {"mode", opts.n ? "monte-carlo" : "analytic"}};
    if (opts.n) m.arguments.emplace_back("n_per_point", std::to_string(*opts.n));
    write_text_file(manifest_path_for(opts.out), manifest_to_json(m));

    out << "wrote " << scan.rows.size() << " rows to " << opts.out.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    // Scenario and default background axes come from the scan's manifest when present.
    std::optional<RunManifest> source_manifest;
    const auto mpath = manifest_path_for(opts.scan);
    if (std::filesystem::exists(mpath)) source_manifest = manifest_from_json(read_text_file(mpath));

    Scenario scenario = Scenario::II;
    if (opts.scenario) {
      scenario = *opts.scenario;
    } else if (source_manifest && source_manifest->scenario) {
      scenario = *source_manifest->scenario;
    }

    double beta1 = 0.0;
    double beta2 = 0.0;
    if (!opts.beta1_deg || !opts.beta2_deg) {
      if (source_manifest && !source_manifest->config_path.empty() &&
          std::filesystem::exists(source_manifest->config_path)) {
        const RunSettings rs = load_config(source_manifest->config_path);
        beta1 = rs.experiment.background.axis1.radians();
        beta2 = rs.experiment.background.axis2.radians();
      }
    }
    if (opts.beta1_deg) beta1 = deg_to_rad(*opts.beta1_deg);
    if (opts.beta2_deg) beta2 = deg_to_rad(*opts.beta2_deg);

    std::ifstream in(opts.scan);
    if (!in) throw IoError("cannot open '" + opts.scan.string() + "' for reading");
    const ScanResult scan = read_scan_csv(in, scenario);
    const FitReport rep = extract_signal(scan, beta1, beta2);

    std::vector<std::pair<std::string, std::string>> extra{{"scan", opts.scan.string()},
                                                           {"scenario", to_string(scenario)},
                                                           {"beta1_deg", format_double(rad_to_deg(beta1))},
                                                           {"beta2_deg", format_double(rad_to_deg(beta2))}};
    if (opts.out) {
      extra.emplace_back("manifest", manifest_path_for(*opts.out).string());
      write_text_file(*opts.out, fit_report_to_json(rep, extra));
      RunManifest m;
      m.command = "fit";
      m.config_path = source_manifest ? source_manifest->config_path : "";
      m.outputs = {opts.out->string()};
      m.timestamp = utc_timestamp();
      m.scenario = scenario;
      m.arguments = {{"scan", opts.scan.string()},
                     {"beta1_deg", format_double(rad_to_deg(beta1))},
                     {"beta2_deg", format_double(rad_to_deg(beta2))}};
      write_text_file(manifest_path_for(*opts.out), manifest_to_json(m));
      out << "wrote fit report to " << opts.out->string() << '\n';
    } else {
      out << fit_report_to_json(rep, extra);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_hbt(const HbtOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunSettings rs = load_config(opts.config);
    const ExperimentConfig& cfg = rs.experiment;
    const std::uint64_t seed = opts.seed.value_or(rs.seed);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

    std::ostringstream csv;
    csv << "baseline_length,total_intensity,interference_term\n";
    const auto baselines = opts.baseline.points();
    for (double L : baselines) {
      if (!(L > 0.0)) throw DomainError("hbt: baseline lengths must be > 0, got " + format_double(L));
      const Geometry g = with_baseline(cfg.geometry, L);
      double phi1 = cfg.phi1;
      double phi2 = cfg.phi2;
      if (opts.random_phases) {
        phi1 = phase(gen);
        phi2 = phase(gen);
      }
      const HbtIntensity h = hbt_intensity(path_amplitudes(g, phi1, phi2, cfg.normalization));
      csv << format_double(L) << ',' << format_double(h.total) << ',' << format_double(h.interference) << '\n';
    }
    write_text_file(opts.out, csv.str());

    RunManifest m;
    m.command = "hbt";
    m.config_path = opts.config.string();
    if (opts.random_phases) m.seed = seed;
    m.outputs = {opts.out.string()};
    m.timestamp = utc_timestamp();
    m.arguments = {{"baseline", grid_text(opts.baseline)}, {"random_phases", opts.random_phases ? "true" : "false"}};
    write_text_file(manifest_path_for(opts.out), manifest_to_json(m));

    out << "wrote " << baselines.size() << " rows to " << opts.out.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace skypol
