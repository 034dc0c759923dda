#pragma once

// Sweep configuration: ingestion from flat key=value text or JSON, override
// strings, validation, and a complete echo for audit output. The right end
// state's velocity is never configured; it is derived from the wave-curve
// connection through the left state so the pair is a 2-rarefaction exactly.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "visclim/errors.hpp"
#include "visclim/gas.hpp"

namespace visclim {

struct SweepConfig {
  double gamma = 2.0;
  double rho_left = 1.0;
  double u1_left = 0.0;
  double rho_right = 4.0;  // u1_right is derived, not configured
  double mu = 1.0;
  double lam = 0.0;
  double T = 1.0;
  double h_time = 0.1;  // error window is [h_time, T]
  double L = 20.0;
  double cfl = 0.5;
  double delta_exponent = 1.0 / 6.0;  // delta = eps^a
  std::vector<double> eps_list = {0.04, 0.02, 0.01, 0.005};
  std::size_t nx = 4000;
  std::size_t ny = 16;
  std::size_t snapshot_count = 10;  // evenly spaced over [h_time, T]
  double perturbation_amplitude = 0.0;
  std::uint64_t perturbation_seed = 0;
  int perturbation_modes = 1;
  int threads = 1;
  std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad numeric value '" + value + "' for key '" + key + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad integer value '" + value + "' for key '" + key + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad unsigned value '" + value + "' for key '" + key + "'");
  }
}

inline std::size_t parse_size(const std::string& key, const std::string& value) {
  const long long x = parse_int(key, value);
  if (x < 0) throw config_error("config: key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(x);
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw config_error("config: empty list for key '" + key + "'");
  return out;
}

}  // namespace detail

inline void set_config_key(SweepConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  if (key == "gamma")
    cfg.gamma = parse_double(key, value);
  else if (key == "rho_left")
    cfg.rho_left = parse_double(key, value);
  else if (key == "u1_left")
    cfg.u1_left = parse_double(key, value);
  else if (key == "rho_right")
    cfg.rho_right = parse_double(key, value);
  else if (key == "mu")
    cfg.mu = parse_double(key, value);
  else if (key == "lam")
    cfg.lam = parse_double(key, value);
  else if (key == "T")
    cfg.T = parse_double(key, value);
  else if (key == "h_time")
    cfg.h_time = parse_double(key, value);
  else if (key == "L")
    cfg.L = parse_double(key, value);
  else if (key == "cfl")
    cfg.cfl = parse_double(key, value);
  else if (key == "delta_exponent")
    cfg.delta_exponent = parse_double(key, value);
  else if (key == "eps_list")
    cfg.eps_list = detail::parse_double_list(key, value);
  else if (key == "nx")
    cfg.nx = detail::parse_size(key, value);
  else if (key == "ny")
    cfg.ny = detail::parse_size(key, value);
  else if (key == "snapshot_count")
    cfg.snapshot_count = detail::parse_size(key, value);
  else if (key == "perturbation_amplitude")
    cfg.perturbation_amplitude = parse_double(key, value);
  else if (key == "perturbation_seed")
    cfg.perturbation_seed = detail::parse_uint(key, value);
  else if (key == "perturbation_modes")
    cfg.perturbation_modes = static_cast<int>(detail::parse_int(key, value));
  else if (key == "threads")
    cfg.threads = static_cast<int>(detail::parse_int(key, value));
  else if (key == "out_dir")
    cfg.out_dir = detail::trim(value);
  else
    throw config_error("config: unknown key '" + key + "'");
}

inline SweepConfig parse_flat_config(const std::string& text) {
  SweepConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
    set_config_key(cfg, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return cfg;
}

inline SweepConfig parse_json_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: JSON root must be an object");
  SweepConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "eps_list") {
      if (!value.is_array() || value.empty())
        throw config_error("config: eps_list must be a non-empty array");
      cfg.eps_list.clear();
      for (const auto& v : value) {
        if (!v.is_number()) throw config_error("config: eps_list entries must be numbers");
        cfg.eps_list.push_back(v.get<double>());
      }
    } else if (value.is_string()) {
      set_config_key(cfg, key, value.get<std::string>());
    } else if (value.is_number()) {
      // dump() is round-trip exact for both integers and doubles
      set_config_key(cfg, key, value.dump());
    } else {
      throw config_error("config: unsupported JSON value for key '" + key + "'");
    }
  }
  return cfg;
}

inline SweepConfig parse_config_text(const std::string& text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '{' ? parse_json_config(text) : parse_flat_config(text);
  }
  return SweepConfig{};
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

/// Applies a single "key=value" override on top of a loaded configuration.
inline void apply_override(SweepConfig& cfg, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos)
    throw config_error("config: override '" + spec + "' is not 'key=value'");
  set_config_key(cfg, detail::trim(spec.substr(0, eq)), spec.substr(eq + 1));
}

/// The Riemann pair of the configured experiment; u1_right comes from the
/// 2-rarefaction curve through the left state.
inline RiemannEndStates sweep_end_states(const SweepConfig& cfg) {
  const GasLaw law(cfg.gamma);
  const GasState1D left{cfg.rho_left, cfg.u1_left};
  const GasState1D right{cfg.rho_right,
                         u1_right_for_2rarefaction(law, left, cfg.rho_right)};
  return RiemannEndStates{left, right};
}

inline void validate_sweep_config(const SweepConfig& cfg) {
  if (!(cfg.gamma > 1.0)) throw config_error("config: need gamma > 1");
  if (!(cfg.rho_left > 0.0 && cfg.rho_right > 0.0))
    throw config_error("config: densities must be positive");
  if (!(cfg.rho_right >= cfg.rho_left))
    throw config_error("config: need rho_right >= rho_left for a 2-rarefaction");
  if (!(cfg.mu > 0.0)) throw config_error("config: need mu > 0");
  if (!(cfg.mu + cfg.lam >= 0.0)) throw config_error("config: need mu + lam >= 0");
  if (!(cfg.h_time > 0.0 && cfg.h_time < cfg.T))
    throw config_error("config: need 0 < h_time < T");
  if (!(cfg.L > 0.0)) throw config_error("config: need L > 0");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw config_error("config: need cfl in (0, 1)");
  if (!(cfg.delta_exponent > 0.0)) throw config_error("config: need delta_exponent > 0");
  if (cfg.eps_list.empty()) throw config_error("config: eps_list must be non-empty");
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    if (!(cfg.eps_list[k] > 0.0)) throw config_error("config: eps values must be positive");
    if (k > 0 && !(cfg.eps_list[k] < cfg.eps_list[k - 1]))
      throw config_error("config: eps_list must be strictly decreasing");
  }
  if (cfg.nx < 8) throw config_error("config: need nx >= 8");
  if (cfg.ny < 4) throw config_error("config: need ny >= 4");
  if (cfg.snapshot_count < 2) throw config_error("config: need snapshot_count >= 2");
  if (!(cfg.perturbation_amplitude >= 0.0))
    throw config_error("config: perturbation amplitude must be non-negative");
  if (cfg.perturbation_modes < 1 || cfg.perturbation_modes > 4)
    throw config_error("config: perturbation modes must lie in [1, 4]");
  if (cfg.threads < 1) throw config_error("config: need threads >= 1");

  // Largest layer width sets the domain requirement shared with the solver.
  const RiemannEndStates ends = sweep_end_states(cfg);
  const GasLaw law(cfg.gamma);
  const double speed = std::max(std::abs(char_speed(law, ends.left, 2)),
                                std::abs(char_speed(law, ends.right, 2)));
  const double delta_max = std::pow(cfg.eps_list.front(), cfg.delta_exponent);
  const double need = speed * (1.0 + cfg.T) + 15.0 * delta_max;
  if (cfg.L < need * (1.0 - 1e-12))
    throw config_error("config: domain half-length " + std::to_string(cfg.L) +
                       " is below the required " + std::to_string(need));
}

/// Complete audit echo: every input parameter, in declaration order.
inline std::string config_echo_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["gamma"] = cfg.gamma;
  j["rho_left"] = cfg.rho_left;
  j["u1_left"] = cfg.u1_left;
  j["rho_right"] = cfg.rho_right;
  j["mu"] = cfg.mu;
  j["lam"] = cfg.lam;
  j["T"] = cfg.T;
  j["h_time"] = cfg.h_time;
  j["L"] = cfg.L;
  j["cfl"] = cfg.cfl;
  j["delta_exponent"] = cfg.delta_exponent;
  j["eps_list"] = cfg.eps_list;
  j["nx"] = cfg.nx;
  j["ny"] = cfg.ny;
  j["snapshot_count"] = cfg.snapshot_count;
  j["perturbation_amplitude"] = cfg.perturbation_amplitude;
  j["perturbation_seed"] = cfg.perturbation_seed;
  j["perturbation_modes"] = cfg.perturbation_modes;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

}  // namespace visclim
