#ifndef MUSKAT_EVOLUTION_HPP
#define MUSKAT_EVOLUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/io.hpp"
#include "muskat/linear.hpp"
#include "muskat/operator.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/snapshot.hpp"

namespace muskat {

enum class InitialKind { SingleMode, GaussianBump, RoughHs };

struct InitialSpec {
  InitialKind kind = InitialKind::SingleMode;
  double amplitude = 0.01;
  int mode = 1;
  double s_rough = 1.6;
  /// Gaussian width; 0 selects L / 20.
  double width = 0.0;
};

struct SimConfig {
  PhysParams params;
  GridSpec grid{2.0 * std::numbers::pi, 256};
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-8;
  double dt_max = 0.1;
  double tol_step = 1e-6;
  double s_monitor = 1.75;
  double blowup_threshold = 1e6;
  /// Snapshot spacing in time; 0 writes only the initial and final states.
  double snapshot_every = 0.0;
  std::uint64_t seed = 0;
  /// false: fixed dt = dt_init, every step accepted.
  bool adaptive = true;
  /// Quadrature cells per half period; 0 picks the default rule.
  int quadrature_cells = 0;
  InitialSpec initial;

  void validate() const {
    params.validate();
    grid.validate();
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and >= 0");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
      throw ConfigError("need 0 < dt_min <= dt_init <= dt_max");
    if (!(tol_step > 0.0)) throw ConfigError("tol_step must be > 0");
    if (!(blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be > 0");
    if (snapshot_every < 0.0) throw ConfigError("snapshot_every must be >= 0");
    if (params.surface_tension()) {
      if (!(s_monitor > 2.0 && s_monitor < 3.0)) throw ConfigError("s_monitor must lie in (2, 3) when sigma > 0");
    } else if (!(s_monitor > 1.5 && s_monitor < 2.0)) {
      throw ConfigError("s_monitor must lie in (3/2, 2) when sigma = 0");
    }
  }
};

struct DiagnosticRecord {
  double t = 0.0;
  double hs = 0.0;
  double linf = 0.0;
  double wiener = 0.0;
  double tail_slope = 0.0;
  double quad_err = 0.0;
  double dt = 0.0;
};

struct SimState {
  double t = 0.0;
  Profile f;
  /// Step size the controller proposes for the next attempt.
  double dt = 0.0;
  long long step_count = 0;
  std::vector<DiagnosticRecord> diagnostics;
};

enum class StepStatus { Accepted, Rejected, BlowupSuspected, Finished };

inline const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Accepted: return "Accepted";
    case StepStatus::Rejected: return "Rejected";
    case StepStatus::BlowupSuspected: return "BlowupSuspected";
    case StepStatus::Finished: return "Finished";
  }
  return "?";
}

struct StepOutcome {
  StepStatus status = StepStatus::Rejected;
  SimState new_state;
  double local_error_est = 0.0;
};

/// Least-squares slope of log|c_k| against xi_k over the upper half of the
/// active modes (k >= 1, |c_k| > 1e-13). Exponential decay e^{-a xi} gives -a.
inline double smoothing_diagnostic(const Profile& f) {
  const auto s = to_spectrum(f);
  const GridSpec& g = f.grid();
  std::vector<int> active;
  for (int k = 1; k < g.nyquist(); ++k)
    if (std::abs(s.at(k)) > 1e-13) active.push_back(k);
  if (active.size() < 8)
    throw InsufficientData("smoothing diagnostic needs >= 8 active modes, found " + std::to_string(active.size()));
  const std::size_t start = active.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(active.size() - start);
  for (std::size_t j = start; j < active.size(); ++j) {
    const double x = g.xi(active[j]);
    const double y = std::log(std::abs(s.at(active[j])));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double smoothing_diagnostic(const SimState& state) {
  if (!(state.t > 0.0)) throw InvalidInput("smoothing diagnostic is defined for t > 0");
  return smoothing_diagnostic(state.f);
}

/// Random spectrum |c_k| = A (1 + |xi_k|)^{-(s + 1/2 + 0.01)} with uniform phases,
/// zero mean and zero Nyquist mode.
inline Profile rough_profile(const GridSpec& grid, double amplitude, double s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Spectrum c(grid);
  const double expo = s + 0.5 + 0.01;
  for (int k = 1; k < grid.nyquist(); ++k) {
    const double mag = amplitude * std::pow(1.0 + std::abs(grid.xi(k)), -expo);
    const cplx v = std::polar(mag, phase(rng));
    c.at(k) = v;
    c.at(-k) = std::conj(v);
  }
  return to_profile(c);
}

/// Quadrature rules shared by all steps of a run.
class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg)
      : cfg_(cfg),
        estimating_(QuadratureRule::midpoint(cfg.grid, cfg.quadrature_cells, true)),
        plain_(QuadratureRule::midpoint(cfg.grid, cfg.quadrature_cells, false)) {
    cfg_.validate();
  }

  [[nodiscard]] const SimConfig& config() const { return cfg_; }

  /// Global frozen symbol: -beta |xi| (sigma = 0) or -beta |xi|^3 (sigma > 0)
  /// with the worst-case slope of f.
  [[nodiscard]] FrozenSymbol global_symbol(const Profile& f) const {
    const double s = max_abs(spectral_derivative(f, 1));
    FrozenSymbol sym;
    if (cfg_.params.surface_tension()) {
      sym.order = 3;
      sym.beta = std::numbers::pi / std::pow(1.0 + s * s, 1.5);
    } else {
      sym.order = 1;
      sym.beta = std::numbers::pi / (1.0 + s * s);
    }
    return sym;
  }

  [[nodiscard]] RhsEvaluation rhs(const Profile& f, bool estimate) const {
    return evolution_rhs(f, cfg_.params, estimate ? estimating_ : plain_);
  }

  /// Linearly implicit Euler: (I - dt L) f1 = f0 + dt (R(f0) - L f0), i.e.
  /// f1 = f0 + dt (I - dt L)^{-1} R(f0) with the multiplier L real and diagonal.
  [[nodiscard]] Profile euler(const Profile& f0, const Profile& r0, double dt) const {
    const FrozenSymbol sym = global_symbol(f0);
    Profile inc = apply_multiplier(r0, [&](double xi) { return cplx(1.0 / (1.0 - dt * sym(xi).real())); });
    return f0 + dt * inc;
  }

  [[nodiscard]] DiagnosticRecord diagnose(const Profile& f, double t, double dt, double quad_err) const {
    DiagnosticRecord d;
    d.t = t;
    d.hs = norm(f, NormSpec::sobolev(cfg_.s_monitor));
    d.linf = max_abs(f);
    d.wiener = norm(f, NormSpec::wiener());
    try {
      d.tail_slope = smoothing_diagnostic(f);
    } catch (const InsufficientData&) {
      d.tail_slope = std::numeric_limits<double>::quiet_NaN();
    }
    d.quad_err = quad_err;
    d.dt = dt;
    return d;
  }

  /// One attempt with step state.dt (clipped to t_end). The error estimate
  /// compares one full step against two half steps in the max norm; the
  /// two-half-step result is the one kept.
  [[nodiscard]] StepOutcome step(const SimState& state) const {
    if (!state.f.all_finite()) throw NumericFailure("non-finite profile at t = " + std::to_string(state.t));
    const double remaining = cfg_.t_end - state.t;
    if (!(remaining > 0.0)) return {StepStatus::Finished, state, 0.0};
    // a final sliver shorter than 1e-9 dt is merged into this step
    const bool last = state.dt >= remaining * (1.0 - 1e-9);
    const double dt = last ? remaining : state.dt;
    const auto r0 = rhs(state.f, true);
    const Profile full = euler(state.f, r0.value, dt);
    const Profile half = euler(state.f, r0.value, 0.5 * dt);
    const Profile two = euler(half, rhs(half, false).value, 0.5 * dt);
    const double err = max_abs(full - two);
    if (!std::isfinite(err) || !two.all_finite()) throw NumericFailure("non-finite step at t = " + std::to_string(state.t));

    StepOutcome out;
    out.local_error_est = err;
    out.new_state = state;
    if (cfg_.adaptive && err > cfg_.tol_step) {
      out.status = StepStatus::Rejected;
      out.new_state.dt = 0.5 * dt;
      if (out.new_state.dt < cfg_.dt_min)
        throw Stagnation("step size fell below dt_min at t = " + fmt17(state.t));
      return out;
    }
    SimState& next = out.new_state;
    next.t = last ? cfg_.t_end : state.t + dt;
    next.f = two;
    next.step_count = state.step_count + 1;
    if (cfg_.adaptive) {
      next.dt = state.dt;
      if (err < 0.25 * cfg_.tol_step) next.dt = std::min(2.0 * state.dt, cfg_.dt_max);
    }
    next.diagnostics.push_back(diagnose(next.f, next.t, dt, r0.quadrature_error));
    if (next.diagnostics.back().hs > cfg_.blowup_threshold)
      out.status = StepStatus::BlowupSuspected;
    else
      out.status = next.t >= cfg_.t_end ? StepStatus::Finished : StepStatus::Accepted;
    return out;
  }

 private:
  SimConfig cfg_;
  QuadratureRule estimating_;
  QuadratureRule plain_;
};

inline StepOutcome step_imex(const SimState& state, const SimConfig& cfg) { return Stepper(cfg).step(state); }

inline SimState initial_state(const SimConfig& cfg, const Profile& f0) {
  if (!(f0.grid() == cfg.grid)) throw GridMismatch("initial profile does not live on the configured grid");
  return {0.0, f0, cfg.dt_init, 0, {}};
}

struct RunOptions {
  /// Snapshots and diagnostics.csv go here when set.
  std::optional<std::filesystem::path> output_dir;
  /// Diagnostics rows of an earlier run to keep in front of the new ones.
  std::string diagnostics_prefix;
};

struct RunResult {
  SimState state;
  StepStatus status = StepStatus::Finished;
  std::string message;
};

inline std::string diagnostics_header() { return "t,Hs,Linf,wiener,tail_slope,quad_err,dt\n"; }

inline std::string diagnostics_row(const DiagnosticRecord& d) {
  return fmt17(d.t) + "," + fmt17(d.hs) + "," + fmt17(d.linf) + "," + fmt17(d.wiener) + "," + fmt17(d.tail_slope) +
         "," + fmt17(d.quad_err) + "," + fmt17(d.dt) + "\n";
}

inline Snapshot make_snapshot(const SimState& s, const PhysParams& p) {
  return {s.f, s.t, s.dt, s.step_count, p.sigma, p.delta_rho, p.theta};
}

inline std::string snapshot_name(long long index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%06lld.csv", index);
  return buf;
}

/// Advance from `state` to cfg.t_end. Snapshots land exactly on multiples of
/// snapshot_every; the controller's proposal survives the clipping.
inline RunResult run_from(const SimConfig& cfg, SimState state, const RunOptions& opts = {}) {
  const Stepper stepper(cfg);
  const double every = cfg.snapshot_every;
  auto snapshot_index = [&](double t) { return every > 0 ? static_cast<long long>(std::llround(t / every)) : 0LL; };
  auto write_snap = [&](const SimState& s, const std::string& name) {
    if (opts.output_dir) write_snapshot(*opts.output_dir / name, make_snapshot(s, cfg.params));
  };
  auto write_diag = [&](const SimState& s) {
    if (!opts.output_dir) return;
    std::string text = diagnostics_header() + opts.diagnostics_prefix;
    for (const auto& d : s.diagnostics) text += diagnostics_row(d);
    write_atomic(*opts.output_dir / "diagnostics.csv", text);
  };
  if (state.t == 0.0) write_snap(state, snapshot_name(0));

  RunResult result;
  result.status = StepStatus::Finished;
  while (state.t < cfg.t_end) {
    SimState trial = state;
    double next_snap = std::numeric_limits<double>::infinity();
    if (every > 0) {
      next_snap = (std::floor(state.t / every + 1e-9) + 1.0) * every;
      if (next_snap < cfg.t_end && state.t + trial.dt > next_snap) trial.dt = next_snap - state.t;
    }
    StepOutcome out;
    try {
      out = stepper.step(trial);
    } catch (const Stagnation& e) {
      result.status = StepStatus::BlowupSuspected;
      result.message = e.what();
      break;
    }
    if (out.status == StepStatus::Rejected) {
      state.dt = out.new_state.dt;
      continue;
    }
    SimState next = std::move(out.new_state);
    if (trial.dt != state.dt) next.dt = cfg.adaptive ? std::max(next.dt, state.dt) : state.dt;
    const bool at_snap = every > 0 && next_snap < cfg.t_end && std::abs(next.t - next_snap) <= 1e-9 * every;
    if (at_snap) {
      next.t = next_snap;
      next.diagnostics.back().t = next_snap;
    }
    state = std::move(next);
    if (at_snap) write_snap(state, snapshot_name(snapshot_index(state.t)));
    if (out.status == StepStatus::BlowupSuspected) {
      result.status = StepStatus::BlowupSuspected;
      result.message = "H^s norm exceeded blowup_threshold at t = " + fmt17(state.t);
      break;
    }
  }
  write_snap(state, "snapshot_final.csv");
  write_diag(state);
  result.state = std::move(state);
  return result;
}

inline RunResult run(const SimConfig& cfg, const Profile& f0, const RunOptions& opts = {}) {
  cfg.validate();
  return run_from(cfg, initial_state(cfg, f0), opts);
}

/// Restore a state from a snapshot written by `run`.
inline SimState resume(const std::filesystem::path& snapshot_path, const SimConfig& cfg) {
  if (!std::filesystem::exists(snapshot_path)) throw IoError("snapshot not found: " + snapshot_path.string());
  const Snapshot s = read_snapshot(snapshot_path);
  if (!(s.f.grid() == cfg.grid))
    throw GridMismatch("snapshot grid (N = " + std::to_string(s.f.grid().n_points) + ", L = " +
                       fmt17(s.f.grid().half_width) + ") does not match the configured grid (N = " +
                       std::to_string(cfg.grid.n_points) + ")");
  return {s.t, s.f, s.dt, s.step_count, {}};
}

}  // namespace muskat

#endif  // MUSKAT_EVOLUTION_HPP
