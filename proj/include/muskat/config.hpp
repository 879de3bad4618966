#ifndef MUSKAT_CONFIG_HPP
#define MUSKAT_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/evolution.hpp"
#include "muskat/grid.hpp"

namespace muskat {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigEntry {
  std::string value;
  std::string where;
};

inline double config_double(const ConfigEntry& e, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != e.value.size() || !std::isfinite(v))
    throw ConfigError(e.where + ": key '" + key + "' expects a finite number, got '" + e.value + "'");
  return v;
}

inline long long config_integer(const ConfigEntry& e, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != e.value.size())
    throw ConfigError(e.where + ": key '" + key + "' expects an integer, got '" + e.value + "'");
  return v;
}

inline bool config_bool(const ConfigEntry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError(e.where + ": key '" + key + "' expects true or false, got '" + e.value + "'");
}

inline InitialKind config_kind(const ConfigEntry& e) {
  if (e.value == "single_mode") return InitialKind::SingleMode;
  if (e.value == "gaussian_bump") return InitialKind::GaussianBump;
  if (e.value == "rough_hs") return InitialKind::RoughHs;
  throw ConfigError(e.where + ": key 'initial.kind' expects single_mode, gaussian_bump or rough_hs, got '" + e.value +
                    "'");
}

/// Splits "key = value"; returns nullopt for blank and comment lines.
inline std::optional<std::pair<std::string, std::string>> split_assignment(const std::string& raw,
                                                                         const std::string& where) {
  std::string line = raw;
  if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
  line = trim(line);
  if (line.empty()) return std::nullopt;
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError(where + ": missing key");
  if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
  return std::make_pair(std::move(key), std::move(value));
}

}  // namespace detail

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::SingleMode: return "single_mode";
    case InitialKind::GaussianBump: return "gaussian_bump";
    case InitialKind::RoughHs: return "rough_hs";
  }
  return "unknown";
}

/// Builds a validated SimConfig from `key = value` text. Overrides use the
/// same syntax and win over file values. Unset derived quantities follow the
/// physics: theta = delta_rho / sigma (or delta_rho = sigma theta when only
/// theta is given), delta_rho = g (rho_minus - rho_plus) when only the
/// densities are given, and s_monitor = 2.5 when sigma > 0.
inline SimConfig parse_config_text(const std::string& text, const std::string& source,
                                   const std::vector<std::string>& overrides = {}) {
  using detail::ConfigEntry;
  std::map<std::string, ConfigEntry> entries;
  std::istringstream in(text);
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const std::string where = source + ":" + std::to_string(no);
    if (auto kv = detail::split_assignment(line, where)) {
      if (entries.count(kv->first))
        throw ConfigError(where + ": key '" + kv->first + "' repeated (first at " + entries[kv->first].where + ")");
      entries[kv->first] = {kv->second, where};
    }
  }
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    const std::string where = "--set #" + std::to_string(i + 1);
    auto kv = detail::split_assignment(overrides[i], where);
    if (!kv) throw ConfigError(where + ": empty override");
    entries[kv->first] = {kv->second, where};
  }

  SimConfig cfg;
  double L = cfg.grid.half_width;
  long long n = cfg.grid.n_points;
  const auto real = [](double& dst) {
    return [&dst](const ConfigEntry& e, const std::string& k) { dst = detail::config_double(e, k); };
  };
  const std::map<std::string, std::function<void(const ConfigEntry&, const std::string&)>> setters{
      {"sigma", real(cfg.params.sigma)},
      {"delta_rho", real(cfg.params.delta_rho)},
      {"theta", real(cfg.params.theta)},
      {"k_perm", real(cfg.params.k_perm)},
      {"mu", real(cfg.params.mu)},
      {"g", real(cfg.params.g)},
      {"rho_minus", real(cfg.params.rho_minus)},
      {"rho_plus", real(cfg.params.rho_plus)},
      {"L", real(L)},
      {"N", [&](const ConfigEntry& e, const std::string& k) { n = detail::config_integer(e, k); }},
      {"t_end", real(cfg.t_end)},
      {"dt_init", real(cfg.dt_init)},
      {"dt_min", real(cfg.dt_min)},
      {"dt_max", real(cfg.dt_max)},
      {"tol_step", real(cfg.tol_step)},
      {"s_monitor", real(cfg.s_monitor)},
      {"blowup_threshold", real(cfg.blowup_threshold)},
      {"snapshot_every", real(cfg.snapshot_every)},
      {"seed",
       [&](const ConfigEntry& e, const std::string& k) {
         const long long v = detail::config_integer(e, k);
         if (v < 0) throw ConfigError(e.where + ": key 'seed' must be >= 0");
         cfg.seed = static_cast<std::uint64_t>(v);
       }},
      {"adaptive", [&](const ConfigEntry& e, const std::string& k) { cfg.adaptive = detail::config_bool(e, k); }},
      {"quadrature_cells",
       [&](const ConfigEntry& e, const std::string& k) {
         cfg.quadrature_cells = static_cast<int>(detail::config_integer(e, k));
       }},
      {"initial.kind", [&](const ConfigEntry& e, const std::string&) { cfg.initial.kind = detail::config_kind(e); }},
      {"initial.amplitude", real(cfg.initial.amplitude)},
      {"initial.mode",
       [&](const ConfigEntry& e, const std::string& k) { cfg.initial.mode = static_cast<int>(detail::config_integer(e, k)); }},
      {"initial.s_rough", real(cfg.initial.s_rough)},
      {"initial.width", real(cfg.initial.width)},
  };

  for (const auto& [key, entry] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(entry.where + ": unknown key '" + key + "'");
    it->second(entry, key);
  }

  const auto has = [&](const char* k) { return entries.count(k) > 0; };
  const auto where = [&](const char* k) { return has(k) ? entries.at(k).where : source; };
  if (n < 16 || n % 2 != 0 || n > (1 << 24))
    throw ConfigError(where("N") + ": key 'N' must be an even integer in [16, 2^24], got " + std::to_string(n));
  if (!(L > 0.0)) throw ConfigError(where("L") + ": key 'L' must be > 0");
  cfg.grid = GridSpec(L, static_cast<int>(n));

  auto& p = cfg.params;
  if (!has("delta_rho") && p.g > 0.0 && (has("rho_minus") || has("rho_plus"))) p.delta_rho = p.g * (p.rho_minus - p.rho_plus);
  if (p.sigma > 0.0) {
    if (has("theta") && !has("delta_rho")) p.delta_rho = p.sigma * p.theta;
    else if (!has("theta")) p.theta = p.delta_rho / p.sigma;
    if (!has("s_monitor")) cfg.s_monitor = 2.5;
  } else if (!has("theta")) {
    p.theta = 0.0;
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    // cite the line of the key most likely responsible
    std::string at = source;
    for (const char* k : {"delta_rho", "sigma", "theta", "s_monitor", "t_end", "dt_init", "dt_min", "dt_max", "tol_step",
                          "blowup_threshold", "snapshot_every", "k_perm", "mu", "g"})
      if (has(k) && std::string(e.what()).find(k) != std::string::npos) {
        at = std::string(where(k)) + " (key '" + k + "')";
        break;
      }
    throw ConfigError(at + ": " + e.what());
  }
  if (cfg.initial.mode < 0) throw ConfigError(where("initial.mode") + ": key 'initial.mode' must be >= 0");
  if (cfg.initial.width < 0.0) throw ConfigError(where("initial.width") + ": key 'initial.width' must be >= 0");
  if (cfg.quadrature_cells < 0) throw ConfigError(where("quadrature_cells") + ": key 'quadrature_cells' must be >= 0");
  return cfg;
}

inline SimConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string(), overrides);
}

/// Config text that parse_config_text maps back to `cfg`.
inline std::string config_text(const SimConfig& cfg) {
  std::string out;
  const auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  put("sigma", fmt17(cfg.params.sigma));
  put("delta_rho", fmt17(cfg.params.delta_rho));
  put("theta", fmt17(cfg.params.theta));
  put("k_perm", fmt17(cfg.params.k_perm));
  put("mu", fmt17(cfg.params.mu));
  put("g", fmt17(cfg.params.g));
  put("rho_minus", fmt17(cfg.params.rho_minus));
  put("rho_plus", fmt17(cfg.params.rho_plus));
  put("L", fmt17(cfg.grid.half_width));
  put("N", std::to_string(cfg.grid.n_points));
  put("t_end", fmt17(cfg.t_end));
  put("dt_init", fmt17(cfg.dt_init));
  put("dt_min", fmt17(cfg.dt_min));
  put("dt_max", fmt17(cfg.dt_max));
  put("tol_step", fmt17(cfg.tol_step));
  put("s_monitor", fmt17(cfg.s_monitor));
  put("blowup_threshold", fmt17(cfg.blowup_threshold));
  put("snapshot_every", fmt17(cfg.snapshot_every));
  put("seed", std::to_string(cfg.seed));
  put("adaptive", cfg.adaptive ? "true" : "false");
  put("quadrature_cells", std::to_string(cfg.quadrature_cells));
  put("initial.kind", to_string(cfg.initial.kind));
  put("initial.amplitude", fmt17(cfg.initial.amplitude));
  put("initial.mode", std::to_string(cfg.initial.mode));
  put("initial.s_rough", fmt17(cfg.initial.s_rough));
  put("initial.width", fmt17(cfg.initial.width));
  return out;
}

/// Profiles steeper than this are outside the validated envelope.
inline constexpr double kMaxInitialSlope = 10.0;

/// Initial profile selected by cfg.initial.
inline Profile make_initial(const SimConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const InitialSpec& in = cfg.initial;
  if (!std::isfinite(in.amplitude)) throw ConfigError("initial.amplitude must be finite");
  Profile f(g);
  switch (in.kind) {
    case InitialKind::SingleMode:
      if (in.mode >= g.nyquist()) throw ConfigError("initial.mode must be below N/2");
      f = Profile::sample(g, [&](double x) { return in.amplitude * std::cos(g.xi(in.mode) * x); });
      break;
    case InitialKind::GaussianBump: {
      const double w = in.width > 0.0 ? in.width : g.half_width / 20.0;
      const auto bump = [&](double x) { return std::exp(-x * x / (2.0 * w * w)); };
      // the bump itself must vanish at the periodic seam
      if (bump(g.half_width) >= 1e-12)
        throw ConfigError("initial.width too large: Gaussian tail at x = L is " + fmt17(bump(g.half_width)) +
                          " (needs < 1e-12)");
      f = Profile::sample(g, [&](double x) { return in.amplitude * bump(x); });
      const double m = mean(f);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
      break;
    }
    case InitialKind::RoughHs:
      if (!(in.s_rough > 0.5)) throw ConfigError("initial.s_rough must be > 1/2");
      f = rough_profile(g, in.amplitude, in.s_rough, cfg.seed);
      break;
  }
  const double slope = max_abs(spectral_derivative(f, 1));
  if (slope > kMaxInitialSlope)
    throw ConfigError("initial profile has max|f'| = " + fmt17(slope) + " > " + fmt17(kMaxInitialSlope));
  return f;
}

}  // namespace muskat

#endif  // MUSKAT_CONFIG_HPP
