// skypol: polarization-entanglement analysis for photon pairs from two sky sources.
//
//   skypol chsh --config exp.json [--angles a,a',b,b'] [--n N] [--seed S]
//   skypol scan --config exp.json --grid-a 0:180:16 --grid-b 0:180:16 --out scan.csv [--n N] [--seed S]
//   skypol fit  scan.csv [--beta1 deg] [--beta2 deg] [--scenario I|II] [--out fit.json]
//   skypol hbt  --config exp.json --baseline 1:50:200 --out hbt.csv [--random-phases] [--seed S]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "skypol/commands.hpp"
#include "skypol/config.hpp"
#include "skypol/io.hpp"

namespace {

// Wraps GridSpec::parse so a malformed grid maps to the config-error exit code.
bool parse_grid(const std::string& text, skypol::GridSpec& into, const char* flag) {
  try {
    into = skypol::GridSpec::parse(text);
    return true;
  } catch (const skypol::ConfigError& e) {
    std::cerr << "error: " << flag << ": " << e.what() << '\n';
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization entanglement between photon pairs from two sky sources"};
  app.set_version_flag("--version", std::string(skypol::kToolVersion));
  app.require_subcommand(1);

  unsigned workers = 0;
  app.add_option("--workers", workers, "Sampling threads (0 = hardware concurrency)");

  skypol::ChshOptions chsh;
  auto* c = app.add_subcommand("chsh", "Analytic and Monte Carlo CHSH value for a configuration");
  c->add_option("--config", chsh.config, "Experiment config (JSON)")->required();
  c->add_option("--angles", chsh.angles, "Override settings a,a',b,b' in degrees");
  c->add_option("--n", chsh.n, "Monte Carlo pairs per setting");
  c->add_option("--seed", chsh.seed, "Monte Carlo seed (default: config rng.seed)");

  skypol::ScanOptions scan;
  std::string scan_ga;
  std::string scan_gb;
  auto* s = app.add_subcommand("scan", "Angular scan of the coincidence correlator to CSV");
  s->add_option("--config", scan.config, "Experiment config (JSON)")->required();
  s->add_option("--grid-a", scan_ga, "Polarizer A grid start:stop:steps (degrees)")->required();
  s->add_option("--grid-b", scan_gb, "Polarizer B grid start:stop:steps (degrees)")->required();
  s->add_option("--out", scan.out, "Output CSV")->required();
  s->add_option("--n", scan.n, "Monte Carlo pairs per grid point (omit for analytic)");
  s->add_option("--seed", scan.seed, "Monte Carlo seed (default: config rng.seed)");

  skypol::FitOptions fit;
  std::string fit_scenario;
  auto* f = app.add_subcommand("fit", "Least-squares signal extraction from a scan CSV");
  f->add_option("scan", fit.scan, "Scan CSV written by `skypol scan`")->required();
  f->add_option("--beta1", fit.beta1_deg, "Source 1 background axis (degrees)");
  f->add_option("--beta2", fit.beta2_deg, "Source 2 background axis (degrees)");
  f->add_option("--scenario", fit_scenario, "Override the scenario recorded in the scan manifest")
      ->check(CLI::IsMember({"I", "II"}));
  f->add_option("--out", fit.out, "Output JSON (default: stdout)");

  skypol::HbtOptions hbt;
  std::string hbt_grid;
  auto* h = app.add_subcommand("hbt", "HBT intensity versus detector baseline to CSV");
  h->add_option("--config", hbt.config, "Experiment config (JSON)")->required();
  h->add_option("--baseline", hbt_grid, "Detector separation start:stop:steps (length units)")->required();
  h->add_option("--out", hbt.out, "Output CSV")->required();
  h->add_flag("--random-phases", hbt.random_phases, "Draw fresh source phases for every row");
  h->add_option("--seed", hbt.seed, "Seed for --random-phases (default: config rng.seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : skypol::kExitConfig;
  }

  if (c->parsed()) {
    chsh.workers = workers;
    return skypol::cmd_chsh(chsh, std::cout, std::cerr);
  }
  if (s->parsed()) {
    if (!parse_grid(scan_ga, scan.grid_a, "--grid-a") || !parse_grid(scan_gb, scan.grid_b, "--grid-b")) {
      return skypol::kExitConfig;
    }
    scan.workers = workers;
    return skypol::cmd_scan(scan, std::cout, std::cerr);
  }
  if (f->parsed()) {
    if (!fit_scenario.empty()) fit.scenario = fit_scenario == "I" ? skypol::Scenario::I : skypol::Scenario::II;
    return skypol::cmd_fit(fit, std::cout, std::cerr);
  }
  if (h->parsed()) {
    if (!parse_grid(hbt_grid, hbt.baseline, "--baseline")) return skypol::kExitConfig;
    return skypol::cmd_hbt(hbt, std::cout, std::cerr);
  }
  return skypol::kExitConfig;
}
