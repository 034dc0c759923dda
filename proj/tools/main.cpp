// Command-line laboratory driver.
//
// Subcommands:
//   profile   - tabulate the background wave profile and its x1 derivatives
//   hypwave   - solve the first-order corrector and dump it per output time
//   simulate  - one full flow run at the first eps in eps_list
//   sweep     - the eps sweep with records, plot data, and per-run artifacts
//   rates     - fit decay rates to a records.csv from an earlier sweep
//
// Exit codes: 0 success, 1 run failure, 2 configuration or usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "visclim/ansatz.hpp"
#include "visclim/config.hpp"
#include "visclim/errors.hpp"
#include "visclim/hyperbolic_wave.hpp"
#include "visclim/ns_solver2d.hpp"
#include "visclim/rarefaction.hpp"
#include "visclim/sweep.hpp"

namespace fs = std::filesystem;
using namespace visclim;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int threads = -1;  // -1: not given on the command line
  std::vector<std::string> overrides;
};

/// Precedence: config file, then --override (in order), then VISCLIM_THREADS,
/// then --threads. --out replaces the configured output directory.
SweepConfig assemble_config(const CommonOptions& opts) {
  SweepConfig cfg = opts.config_path.empty() ? SweepConfig{} : load_config(opts.config_path);
  for (const std::string& o : opts.overrides) apply_override(cfg, o);
  if (const char* env = std::getenv("VISCLIM_THREADS")) {
    cfg.threads = static_cast<int>(detail::parse_int("VISCLIM_THREADS", env));
  }
  if (opts.threads >= 0) cfg.threads = opts.threads;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  validate_sweep_config(cfg);
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw run_error("cannot create output directory '" + dir + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw run_error("cannot open '" + path + "'");
  f << text;
  f.flush();
  if (!f) throw run_error("write failed for '" + path + "'");
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int cmd_profile(const SweepConfig& cfg, double time) {
  const double eps = cfg.eps_list.front();
  const double delta = std::pow(eps, cfg.delta_exponent);
  const RarefactionProfile profile(GasLaw(cfg.gamma), sweep_end_states(cfg), delta,
                                   /*time_shift=*/eps);
  const Grid1D grid(-cfg.L, cfg.L, cfg.nx);
  ensure_out_dir(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / "config.json").string(), config_echo_json(cfg));

  std::ofstream f((fs::path(cfg.out_dir) / "profile.csv").string());
  if (!f) throw run_error("cannot open profile.csv in '" + cfg.out_dir + "'");
  f << "x1,rho_bar,rhox_bar,rhoxx_bar,rhoxxx_bar,u1_bar,u1x_bar,u1xx_bar,u1xxx_bar,m1_bar\n";
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.center(i);
    const ProfilePointValue q = profile.eval(time, x);
    f << fmt17(x) << ',' << fmt17(q.rho_bar) << ',' << fmt17(q.rhox_bar) << ','
      << fmt17(q.rhoxx_bar) << ',' << fmt17(q.rhoxxx_bar) << ',' << fmt17(q.u1_bar) << ','
      << fmt17(q.u1x_bar) << ',' << fmt17(q.u1xx_bar) << ',' << fmt17(q.u1xxx_bar) << ','
      << fmt17(q.m1_bar) << '\n';
  }
  f.flush();
  if (!f) throw run_error("write failed for profile.csv");
  std::cout << "profile: eps " << eps << ", delta " << delta << ", " << cfg.nx
            << " rows at t " << time << " -> " << cfg.out_dir << "/profile.csv\n";
  return 0;
}

int cmd_hypwave(const SweepConfig& cfg) {
  const double eps = cfg.eps_list.front();
  const double delta = std::pow(eps, cfg.delta_exponent);
  const RarefactionProfile profile(GasLaw(cfg.gamma), sweep_end_states(cfg), delta,
                                   /*time_shift=*/eps);
  const Grid1D grid(-cfg.L, cfg.L, cfg.nx);
  const std::vector<double> ts = snapshot_schedule(cfg);  // shared with the flow runs
  const HyperbolicWaveField wave =
      solve(profile, eps, cfg.mu, cfg.lam, cfg.T, grid, ts, cfg.threads);

  ensure_out_dir(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / "config.json").string(), config_echo_json(cfg));
  std::ofstream f((fs::path(cfg.out_dir) / "hypwave.csv").string());
  if (!f) throw run_error("cannot open hypwave.csv in '" + cfg.out_dir + "'");
  f << "t,x1,d1,d2,D1,D2\n";
  for (std::size_t k = 0; k < wave.times.size(); ++k) {
    for (std::size_t i = 0; i < grid.n; ++i) {
      f << fmt17(wave.times[k]) << ',' << fmt17(grid.center(i)) << ','
        << fmt17(wave.d1[k][i]) << ',' << fmt17(wave.d2[k][i]) << ','
        << fmt17(wave.D1[k][i]) << ',' << fmt17(wave.D2[k][i]) << '\n';
    }
  }
  f.flush();
  if (!f) throw run_error("write failed for hypwave.csv");

  nlohmann::ordered_json meta;
  meta["eps"] = eps;
  meta["delta"] = delta;
  meta["times"] = wave.times;
  std::vector<double> sq(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    sq[i] = wave.d1.back()[i] * wave.d1.back()[i] + wave.d2.back()[i] * wave.d2.back()[i];
  meta["corrector_l2_final"] = std::sqrt(detail::pairwise_sum(sq.data(), sq.size()) * grid.h);
  write_text((fs::path(cfg.out_dir) / "hypwave.json").string(), meta.dump(2) + "\n");
  std::cout << "hypwave: eps " << eps << ", " << wave.times.size() << " time slices -> "
            << cfg.out_dir << "/hypwave.csv\n";
  return 0;
}

int cmd_simulate(const SweepConfig& cfg) {
  const double eps = cfg.eps_list.front();
  const EpsRunDetail d = run_one_eps_or_throw(cfg, eps, cfg.threads);
  ensure_out_dir(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / "config.json").string(), config_echo_json(cfg));

  nlohmann::ordered_json meta;
  meta["eps"] = d.eps;
  meta["delta"] = d.delta;
  meta["record"] = {{"eps", d.record.eps},
                    {"delta", d.record.delta},
                    {"sup_err", d.record.sup_err},
                    {"e_tau_sup", d.record.e_tau_sup},
                    {"hypwave_l2", d.record.hypwave_l2},
                    {"runtime_seconds", d.record.runtime_seconds}};
  meta["mass_budget_error"] = d.mass_budget_error;
  meta["steps"] = d.sim.steps;
  nlohmann::ordered_json snaps = nlohmann::ordered_json::array();
  for (const SnapshotDiagnostic& s : d.snapshots) {
    nlohmann::ordered_json sj;
    sj["t"] = s.t;
    sj["E_tau"] = s.e_tau;
    sj["sup_err"] = s.has_sup_err ? nlohmann::json(s.sup_err) : nlohmann::json();
    sj["phi_potential_integral"] = s.phi_potential_integral;
    snaps.push_back(sj);
  }
  meta["snapshots"] = snaps;
  write_text((fs::path(cfg.out_dir) / "metadata.json").string(), meta.dump(2) + "\n");

  for (std::size_t k = 0; k < d.sim.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "field_%03zu.csv", k);
    write_field_csv(d.sim.snapshots[k], (fs::path(cfg.out_dir) / name).string());
  }
  write_field_csv(d.sim.snapshots.back(), (fs::path(cfg.out_dir) / "final_field.csv").string());
  std::cout << "simulate: eps " << eps << ", " << d.sim.steps << " steps, sup_err "
            << d.record.sup_err << " -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep(const SweepConfig& cfg) {
  const SweepOutcome out = run_sweep(cfg);
  write_sweep_artifacts(cfg, out, cfg.out_dir);
  for (const SweepRecord& r : out.records) {
    std::cout << "eps " << r.eps << ": sup_err " << r.sup_err << ", e_tau_sup "
              << r.e_tau_sup << ", hypwave_l2 " << r.hypwave_l2 << " ("
              << r.runtime_seconds << " s)\n";
  }
  for (const SweepOutcome::Failure& fail : out.failures) {
    std::cerr << "eps " << fail.eps << " failed: " << fail.reason << "\n";
  }
  std::cout << "sweep: " << out.records.size() << " of " << cfg.eps_list.size()
            << " runs succeeded -> " << cfg.out_dir << "\n";
  return out.ok() ? 0 : 1;
}

std::vector<SweepRecord> read_records_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("rates: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) ||
      line != "eps,delta,sup_err,e_tau_sup,hypwave_l2,runtime_seconds")
    throw config_error("rates: '" + path + "' is not a sweep records file");
  std::vector<SweepRecord> recs;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    SweepRecord r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r.eps, &r.delta, &r.sup_err,
                    &r.e_tau_sup, &r.hypwave_l2, &r.runtime_seconds) != 6)
      throw config_error("rates: malformed row in '" + path + "'");
    recs.push_back(r);
  }
  return recs;
}

int cmd_rates(const std::string& records_path, const std::string& out_dir) {
  const std::vector<SweepRecord> recs = read_records_csv(records_path);
  const RateFit pure = fit_rate(recs, RateModel::pure_power);
  const RateFit plog = fit_rate(recs, RateModel::power_log);
  std::cout << "pure power : exponent " << pure.exponent << ", constant " << pure.constant
            << ", max log residual " << pure.max_residual << "\n";
  std::cout << "power * log: exponent " << plog.exponent << ", constant " << plog.constant
            << ", max log residual " << plog.max_residual << "\n";
  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    nlohmann::ordered_json j;
    j["records"] = records_path;
    j["pure_power"] = {{"exponent", pure.exponent},
                       {"constant", pure.constant},
                       {"max_residual", pure.max_residual}};
    j["power_log"] = {{"exponent", plog.exponent},
                      {"constant", plog.constant},
                      {"max_residual", plog.max_residual}};
    write_text((fs::path(out_dir) / "rates.json").string(), j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous-limit laboratory for the planar rarefaction wave"};
  app.require_subcommand(1);
  app.fallthrough();  // global options are accepted on either side of the subcommand

  CommonOptions opts;
  app.add_option("-c,--config", opts.config_path,
                 "configuration file (flat key=value or JSON)");
  app.add_option("-o,--out", opts.out_dir, "output directory (overrides config out_dir)");
  app.add_option("-t,--threads", opts.threads, "worker thread budget");
  app.add_option("-O,--override", opts.overrides, "key=value applied after the config file");

  CLI::App* profile_cmd = app.add_subcommand("profile", "tabulate the background profile");
  double profile_time = 0.0;
  profile_cmd->add_option("--time", profile_time, "evaluation time (default 0)");
  CLI::App* hypwave_cmd = app.add_subcommand("hypwave", "solve the first-order corrector");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "one flow run at the largest eps");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the full eps sweep");
  CLI::App* rates_cmd = app.add_subcommand("rates", "fit decay rates to sweep records");
  std::string records_path;
  rates_cmd->add_option("--records", records_path, "records.csv from a sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rates_cmd->parsed()) {
      // rates reads a file; no physical configuration is needed.
      if (records_path.empty()) {
        const std::string base = opts.out_dir.empty() ? "out" : opts.out_dir;
        records_path = (fs::path(base) / "records.csv").string();
      }
      return cmd_rates(records_path, opts.out_dir);
    }
    const SweepConfig cfg = assemble_config(opts);
    if (profile_cmd->parsed()) return cmd_profile(cfg, profile_time);
    if (hypwave_cmd->parsed()) return cmd_hypwave(cfg);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    throw config_error("no subcommand selected");
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
