#pragma once

// The vanishing-viscosity experiment: for each eps in the configured list,
// build the background profile with delta = eps^a, solve the first-order
// corrector, assemble initial data, run the flow to T, and measure the
// supremum error against the exact fan over [h_time, T] plus the scaled-frame
// perturbation energy per snapshot. Runs are independent; failures are
// recorded per eps and the remaining runs continue. Rate fitting compares the
// measured errors with the reference decay eps^{1/6} |ln eps|.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "visclim/ansatz.hpp"
#include "visclim/config.hpp"
#include "visclim/detail/parallel.hpp"
#include "visclim/diagnostics.hpp"
#include "visclim/errors.hpp"
#include "visclim/hyperbolic_wave.hpp"
#include "visclim/ns_solver2d.hpp"
#include "visclim/rarefaction.hpp"

namespace visclim {

struct SweepRecord {
  double eps = 0.0;
  double delta = 0.0;
  double sup_err = 0.0;
  double e_tau_sup = 0.0;
  double hypwave_l2 = 0.0;
  double runtime_seconds = 0.0;
};

struct SnapshotDiagnostic {
  double t = 0.0;
  double e_tau = 0.0;  // scaled-frame L2 of (phi, psi1, psi2)
  double sup_err = 0.0;
  bool has_sup_err = false;  // false at t = 0 where the fan is undefined
  double phi_potential_integral = 0.0;
};

struct EpsRunDetail {
  double eps = 0.0;
  double delta = 0.0;
  std::string error;  // empty on success
  SweepRecord record{};
  std::vector<SnapshotDiagnostic> snapshots;
  double mass_budget_error = 0.0;
  SimulationResult sim;  // snapshot fields and times; empty on failure
};

struct SweepOutcome {
  std::vector<SweepRecord> records;  // successful runs, in eps_list order
  struct Failure {
    double eps = 0.0;
    std::string reason;
  };
  std::vector<Failure> failures;
  std::vector<EpsRunDetail> details;  // one entry per eps, in eps_list order
  bool ok() const { return failures.empty(); }
};

/// Evenly spaced output times over [h_time, T], endpoint pinned to T exactly.
inline std::vector<double> snapshot_schedule(const SweepConfig& cfg) {
  std::vector<double> ts(cfg.snapshot_count);
  const double span = cfg.T - cfg.h_time;
  for (std::size_t k = 0; k < cfg.snapshot_count; ++k)
    ts[k] = cfg.h_time + span * static_cast<double>(k) /
                             static_cast<double>(cfg.snapshot_count - 1);
  ts.back() = cfg.T;
  return ts;
}

namespace detail {

inline double potential_integral(const Field2D& f, const std::vector<double>& rho_tilde,
                                 const GasLaw& law) {
  const Grid2D& g = f.grid;
  std::vector<double> cell(g.cells());
  for (std::size_t i = 0; i < g.x.n; ++i)
    for (std::size_t j = 0; j < g.y.n; ++j)
      cell[g.idx(i, j)] = potential_energy(law, f.rho[g.idx(i, j)], rho_tilde[i]);
  return pairwise_sum(cell.data(), cell.size()) * g.x.h * g.y.h;
}

}  // namespace detail

/// One eps of the sweep; throws on failure (run_one_eps wraps this with the
/// record-and-continue policy).
inline EpsRunDetail run_one_eps_or_throw(const SweepConfig& cfg, double eps,
                                         int inner_threads) {
  EpsRunDetail out;
  out.eps = eps;
  out.delta = std::pow(eps, cfg.delta_exponent);
  const auto clock_start = std::chrono::steady_clock::now();
  {
    const GasLaw law(cfg.gamma);
    const RiemannEndStates ends = sweep_end_states(cfg);
    // The profile clock starts at eps so the initial layer has width ~ delta.
    const RarefactionProfile profile(law, ends, out.delta, /*time_shift=*/eps);
    const std::vector<double> ts = snapshot_schedule(cfg);
    const Grid1D hgrid(-cfg.L, cfg.L, cfg.nx);
    HyperbolicWaveField wave =
        solve(profile, eps, cfg.mu, cfg.lam, cfg.T, hgrid, ts, inner_threads);
    const AnsatzProfile ansatz = build_ansatz(profile, std::move(wave));

    const Grid2D grid(cfg.L, cfg.nx, cfg.ny);
    const PerturbationSpec pspec{cfg.perturbation_amplitude, cfg.perturbation_seed,
                                 cfg.perturbation_modes};
    const Field2D init = initial_data(ansatz, pspec, grid);
    const SolverConfig scfg{cfg.L,  cfg.nx,  cfg.ny, cfg.cfl, eps,
                            cfg.mu, cfg.lam, ts,     inner_threads};
    const SimulationResult sim = run(init, scfg, profile, cfg.T);

    if (sim.times.size() != ansatz.wave.times.size())
      throw run_error("sweep: snapshot schedules diverged");
    for (std::size_t k = 0; k < sim.times.size(); ++k)
      if (std::abs(sim.times[k] - ansatz.wave.times[k]) > 1e-12)
        throw run_error("sweep: snapshot schedules diverged");

    double e_sup = 0.0;
    for (std::size_t k = 0; k < sim.times.size(); ++k) {
      const Field2D& f = sim.snapshots[k];
      const PerturbationField p =
          extract_perturbation(f, ansatz.rho_tilde[k], ansatz.u1_tilde[k]);
      const double a = field_norm(p.phi, grid, NormKind::L2);
      const double b = field_norm(p.psi1, grid, NormKind::L2);
      const double c = field_norm(p.psi2, grid, NormKind::L2);
      SnapshotDiagnostic d;
      d.t = sim.times[k];
      d.e_tau = std::sqrt(a * a + b * b + c * c) / eps;
      d.phi_potential_integral = detail::potential_integral(f, ansatz.rho_tilde[k], law);
      if (sim.times[k] > 0.0) {
        d.sup_err = sup_error_vs_fan({sim.times[k]}, {f}, law, ends, sim.times[k],
                                     sim.times[k]);
        d.has_sup_err = true;
      }
      e_sup = std::max(e_sup, d.e_tau);
      out.snapshots.push_back(d);
    }

    SweepRecord rec;
    rec.eps = eps;
    rec.delta = out.delta;
    rec.sup_err = sup_error_vs_fan(sim.times, sim.snapshots, law, ends, cfg.h_time, cfg.T);
    rec.e_tau_sup = e_sup;
    const std::vector<double>& d1 = ansatz.wave.d1.back();
    const std::vector<double>& d2 = ansatz.wave.d2.back();
    std::vector<double> sq(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) sq[i] = d1[i] * d1[i] + d2[i] * d2[i];
    rec.hypwave_l2 = std::sqrt(detail::pairwise_sum(sq.data(), sq.size()) * hgrid.h);
    out.record = rec;
    out.mass_budget_error = sim.mass_budget_error;
    out.sim = sim;
  }
  out.record.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return out;
}

/// One eps of the sweep. Exceptions become the detail's error string so a
/// failing eps never takes down its siblings.
inline EpsRunDetail run_one_eps(const SweepConfig& cfg, double eps, int inner_threads) {
  const auto clock_start = std::chrono::steady_clock::now();
  try {
    return run_one_eps_or_throw(cfg, eps, inner_threads);
  } catch (const std::exception& e) {
    EpsRunDetail out;
    out.eps = eps;
    out.delta = std::pow(eps, cfg.delta_exponent);
    out.error = e.what();
    out.record.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
            .count();
    return out;
  }
}

/// Runs every eps, up to cfg.threads concurrently; leftover thread budget is
/// handed to the solver inside each run. Output order follows eps_list.
inline SweepOutcome run_sweep(const SweepConfig& cfg) {
  validate_sweep_config(cfg);
  const std::size_t n = cfg.eps_list.size();
  const int conc = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n)));
  const int inner = std::max(1, cfg.threads / conc);

  SweepOutcome out;
  out.details.resize(n);
  std::counting_semaphore<> gate(conc);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    // run_one_eps never throws, so the gate is always released.
    pool.emplace_back([&cfg, &out, &gate, k, inner] {
      gate.acquire();
      out.details[k] = run_one_eps(cfg, cfg.eps_list[k], inner);
      gate.release();
    });
  }
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < n; ++k) {
    if (out.details[k].error.empty())
      out.records.push_back(out.details[k].record);
    else
      out.failures.push_back({cfg.eps_list[k], out.details[k].error});
  }
  return out;
}

enum class RateModel { pure_power, power_log };

struct RateFit {
  double exponent = 0.0;
  double constant = 0.0;
  double max_residual = 0.0;  // in log space
};

/// Least squares for ln y = alpha ln x + ln C.
inline RateFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw config_error("fit_rate: need at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0) || !std::isfinite(xs[k]) || !std::isfinite(ys[k]))
      throw config_error("fit_rate: points must be finite and positive");
    lx[k] = std::log(xs[k]);
    ly[k] = std::log(ys[k]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw config_error("fit_rate: degenerate abscissas");
  RateFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.constant = std::exp(intercept);
  for (std::size_t k = 0; k < n; ++k)
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ly[k] - (fit.exponent * lx[k] + intercept)));
  return fit;
}

inline RateFit fit_rate(const std::vector<SweepRecord>& records, RateModel model) {
  std::vector<double> xs, ys;
  for (const SweepRecord& r : records) {
    xs.push_back(r.eps);
    if (model == RateModel::power_log) {
      const double lf = std::abs(std::log(r.eps));
      if (!(lf > 0.0)) throw config_error("fit_rate: |ln eps| vanishes at eps = 1");
      ys.push_back(r.sup_err / lf);
    } else {
      ys.push_back(r.sup_err);
    }
  }
  return fit_power_law(xs, ys);
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw run_error("emit: cannot open '" + path + "'");
  return f;
}

inline void finish_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw run_error("emit: write failed for '" + path + "'");
}

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  if (records.empty()) throw config_error("emit: no records");
  std::ofstream f = detail::open_output(path);
  f << "eps,delta,sup_err,e_tau_sup,hypwave_l2,runtime_seconds\n";
  for (const SweepRecord& r : records)
    f << detail::fmt17(r.eps) << ',' << detail::fmt17(r.delta) << ','
      << detail::fmt17(r.sup_err) << ',' << detail::fmt17(r.e_tau_sup) << ','
      << detail::fmt17(r.hypwave_l2) << ',' << detail::fmt17(r.runtime_seconds) << '\n';
  detail::finish_output(f, path);
}

inline void emit_json(const std::vector<SweepRecord>& records, const std::string& path) {
  if (records.empty()) throw config_error("emit: no records");
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SweepRecord& r : records) {
    nlohmann::ordered_json j;
    j["eps"] = r.eps;
    j["delta"] = r.delta;
    j["sup_err"] = r.sup_err;
    j["e_tau_sup"] = r.e_tau_sup;
    j["hypwave_l2"] = r.hypwave_l2;
    j["runtime_seconds"] = r.runtime_seconds;
    arr.push_back(j);
  }
  std::ofstream f = detail::open_output(path);
  f << arr.dump(2) << '\n';
  detail::finish_output(f, path);
}

/// Plot data: log-log coordinates plus the error normalized by the reference
/// decay eps^{1/6} |ln eps|; a bounded column is the theorem-rate signature.
inline void emit_plot_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  if (records.empty()) throw config_error("emit: no records");
  std::ofstream f = detail::open_output(path);
  f << "log10_eps,log10_sup_err,normalized_err\n";
  for (const SweepRecord& r : records) {
    const double ref = std::pow(r.eps, 1.0 / 6.0) * std::abs(std::log(r.eps));
    f << detail::fmt17(std::log10(r.eps)) << ',' << detail::fmt17(std::log10(r.sup_err))
      << ',' << detail::fmt17(r.sup_err / ref) << '\n';
  }
  detail::finish_output(f, path);
}

/// Conservative field dump, one row per cell in storage order.
inline void write_field_csv(const Field2D& field, const std::string& path) {
  std::ofstream f = detail::open_output(path);
  f << "x1,x2,rho,m1,m2\n";
  const Grid2D& g = field.grid;
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      f << detail::fmt17(g.x.center(i)) << ',' << detail::fmt17(g.y.center(j)) << ','
        << detail::fmt17(field.rho[c]) << ',' << detail::fmt17(field.m1[c]) << ','
        << detail::fmt17(field.m2[c]) << '\n';
    }
  }
  detail::finish_output(f, path);
}

/// Full artifact tree: config echo, record tables, plot data, and one
/// directory per eps with snapshot diagnostics and the final field.
inline void write_sweep_artifacts(const SweepConfig& cfg, const SweepOutcome& outcome,
                                  const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw run_error("emit: cannot create directory '" + dir + "'");
  {
    std::ofstream f = detail::open_output((fs::path(dir) / "config.json").string());
    f << config_echo_json(cfg);
    detail::finish_output(f, dir);
  }
  if (!outcome.records.empty()) {
    emit_csv(outcome.records, (fs::path(dir) / "records.csv").string());
    emit_json(outcome.records, (fs::path(dir) / "records.json").string());
    emit_plot_csv(outcome.records, (fs::path(dir) / "plot.csv").string());
  }
  for (std::size_t k = 0; k < outcome.details.size(); ++k) {
    const EpsRunDetail& d = outcome.details[k];
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03zu", k);
    const fs::path rundir = fs::path(dir) / name;
    fs::create_directories(rundir, ec);
    if (ec) throw run_error("emit: cannot create directory '" + rundir.string() + "'");

    nlohmann::ordered_json meta;
    meta["eps"] = d.eps;
    meta["delta"] = d.delta;
    meta["error"] = d.error.empty() ? nlohmann::json() : nlohmann::json(d.error);
    if (d.error.empty()) {
      meta["record"] = {{"eps", d.record.eps},
                        {"delta", d.record.delta},
                        {"sup_err", d.record.sup_err},
                        {"e_tau_sup", d.record.e_tau_sup},
                        {"hypwave_l2", d.record.hypwave_l2},
                        {"runtime_seconds", d.record.runtime_seconds}};
      meta["mass_budget_error"] = d.mass_budget_error;
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
    }
    {
      std::ofstream f = detail::open_output((rundir / "metadata.json").string());
      f << meta.dump(2) << '\n';
      detail::finish_output(f, rundir.string());
    }
    if (d.error.empty()) {
      write_field_csv(d.sim.snapshots.back(), (rundir / "final_field.csv").string());
    }
  }
}

}  // namespace visclim
