#ifndef MUSKAT_VERIFY_HPP
#define MUSKAT_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/io.hpp"
#include "muskat/kernels.hpp"
#include "muskat/linear.hpp"
#include "muskat/operator.hpp"
#include "muskat/tolerances.hpp"

namespace muskat {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// passed iff measured <= tolerance; NaN never passes.
inline CheckResult make_check(const std::string& name, double measured, const std::string& note = {}) {
  const auto& e = tolerance_entry(name);
  CheckResult r{name, measured, e.tolerance, measured <= e.tolerance, std::string(e.detail)};
  if (!note.empty()) r.detail += "; " + note;
  return r;
}

/// A check whose computation threw is recorded as failed with the reason.
inline CheckResult guarded_check(const std::string& name, const std::function<double()>& measure) {
  try {
    return make_check(name, measure());
  } catch (const std::exception& e) {
    return make_check(name, std::numeric_limits<double>::quiet_NaN(), std::string("error: ") + e.what());
  }
}

inline bool all_passed(const std::vector<CheckResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckResult& r) { return r.passed; });
}

inline void sort_by_name(std::vector<CheckResult>& rs) {
  std::stable_sort(rs.begin(), rs.end(), [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
}

inline std::string report_csv(const std::vector<CheckResult>& rs) {
  std::string out = "name,measured,tolerance,passed\n";
  for (const auto& r : rs)
    out += r.name + "," + fmt17(r.measured) + "," + fmt17(r.tolerance) + "," + (r.passed ? "true" : "false") + "\n";
  return out;
}

inline std::string report_text(const std::vector<CheckResult>& rs) {
  std::string out;
  for (const auto& r : rs) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %-32s measured %-12.5g tolerance %-10.4g ", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.measured, r.tolerance);
    out += buf + r.detail + "\n";
  }
  return out;
}

namespace experiments {

inline Profile sine_profile(const GridSpec& g, double amp) {
  return Profile::sample(g, [&](double x) { return amp * std::sin(std::numbers::pi * x / g.half_width); });
}

/// Spectral relative error of `got` against the multiplier m applied to h.
inline double symbol_error(const Profile& got, const Profile& h, const std::function<cplx(double)>& m) {
  const Profile ref = apply_multiplier(h, m);
  return norm(got - ref, NormSpec::l2()) / norm(ref, NormSpec::l2());
}

/// Worst relative L2 error of A_{0,0}(0) + pi H (sign = +1) or B_{0,1}(0) - pi H (sign = -1).
inline double flat_hilbert_error(const GridSpec& g, std::uint64_t seed, bool a_operator, int samples = 20) {
  const auto rule = QuadratureRule::midpoint(g, 0, false);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Profile c = random_band_limited(g, rng, 8.0 / g.n_points);
    const Profile hc = hilbert_transform(c);
    const Profile err = a_operator ? apply_A({{Profile(g)}, {}}, c, rule).value + std::numbers::pi * hc
                                   : apply_B({{}, {Profile(g)}}, c, rule).value - std::numbers::pi * hc;
    worst = std::max(worst, norm(err, NormSpec::l2()) / norm(c, NormSpec::l2()));
  }
  return worst;
}

/// Ratio c_k(t)/c_k(0) - e^{m t} relative error for one mode, fixed dt = t/200 over one e-folding.
inline double linear_rate_deviation(SimConfig cfg, int mode, double amp = 1e-6) {
  const GridSpec& g = cfg.grid;
  const double xi = std::abs(g.xi(mode));
  double rate = -std::numbers::pi * xi;
  if (cfg.params.surface_tension()) {
    rate = -std::numbers::pi * xi * xi * xi - cfg.params.theta * std::numbers::pi * xi;
    cfg.s_monitor = 2.5;
  } else {
    cfg.s_monitor = 1.75;
  }
  if (rate == 0.0) throw InvalidInput("neutral mode has no e-folding time");
  cfg.t_end = 1.0 / std::abs(rate);
  cfg.adaptive = false;
  cfg.dt_init = cfg.dt_min = cfg.dt_max = cfg.t_end / 200.0;
  cfg.snapshot_every = 0.0;
  const Profile f0 = Profile::sample(g, [&](double x) { return amp * std::cos(g.xi(mode) * x); });
  const auto r = run(cfg, f0);
  if (r.status != StepStatus::Finished) throw NumericFailure("linear-rate run ended with " + std::string(to_string(r.status)));
  const double gain = to_spectrum(r.state.f).at(mode).real() / to_spectrum(f0).at(mode).real();
  return std::abs(gain / std::exp(rate * cfg.t_end) - 1.0);
}

/// Largest per-mode log growth of a small random datum over a short run.
inline double max_mode_growth(SimConfig cfg, std::uint64_t seed) {
  cfg.s_monitor = 2.5;
  cfg.t_end = 0.05;
  cfg.adaptive = false;
  cfg.dt_init = cfg.dt_min = cfg.dt_max = 1e-3;
  const GridSpec& g = cfg.grid;
  std::mt19937_64 rng(seed);
  Profile f0 = random_band_limited(g, rng, 0.2);
  f0 *= 1e-6;
  const auto r = run(cfg, f0);
  const auto s0 = to_spectrum(f0), s1 = to_spectrum(r.state.f);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < g.nyquist(); ++k)
    if (std::abs(s0.at(k)) > 1e-20) worst = std::max(worst, std::log(std::abs(s1.at(k)) / std::abs(s0.at(k))));
  return worst;
}

struct MediumDataRun {
  StepStatus status = StepStatus::Finished;
  double hs_growth = 0.0;
  double wiener_growth = 0.0;
  double t_reached = 0.0;
};

/// sigma = 0 run from a rough-ish datum (spectral decay index 1.8) rescaled to Wiener norm `wiener`.
inline MediumDataRun medium_data_run(SimConfig cfg, double wiener = 0.10, double t_end = 10.0) {
  if (cfg.params.surface_tension()) cfg.params = PhysParams::no_tension(1.0);
  cfg.s_monitor = 1.75;
  cfg.t_end = t_end;
  cfg.snapshot_every = 0.0;
  cfg.adaptive = true;
  cfg.dt_init = std::min(cfg.dt_init, 1e-3);
  cfg.dt_max = std::min(cfg.dt_max, 0.05);
  Profile f0 = rough_profile(cfg.grid, 1.0, 1.8, cfg.seed);
  f0 *= wiener / norm(f0, NormSpec::wiener());
  const double hs0 = norm(f0, NormSpec::sobolev(1.75));
  const double w0 = norm(f0, NormSpec::wiener());
  const auto r = run(cfg, f0);
  MediumDataRun out;
  out.status = r.status;
  out.t_reached = r.state.t;
  double hs = hs0, w = w0;
  for (const auto& d : r.state.diagnostics) {
    hs = std::max(hs, d.hs);
    w = std::max(w, d.wiener);
  }
  out.hs_growth = hs / hs0;
  out.wiener_growth = w / w0;
  return out;
}

/// Tail slopes (in grid-frequency units xi dx) of a rough H^1.6 datum evolved to each time in `times`.
inline std::vector<double> smoothing_slopes(SimConfig cfg, const std::vector<double>& times, double amplitude = 0.05) {
  if (cfg.params.surface_tension()) cfg.params = PhysParams::no_tension(1.0);
  cfg.s_monitor = 1.75;
  cfg.snapshot_every = 0.0;
  cfg.adaptive = true;
  cfg.dt_init = std::min(cfg.dt_init, 1e-4);
  cfg.dt_max = std::min(cfg.dt_max, 2e-3);
  SimState state = initial_state(cfg, rough_profile(cfg.grid, amplitude, 1.6, cfg.seed));
  std::vector<double> slopes;
  for (double t : times) {
    cfg.t_end = t;
    auto r = run_from(cfg, state);
    if (r.status != StepStatus::Finished) throw NumericFailure("smoothing run ended with " + std::string(to_string(r.status)));
    state = std::move(r.state);
    state.diagnostics.clear();
    slopes.push_back(smoothing_diagnostic(state) / cfg.grid.dx());
  }
  return slopes;
}

/// Observed temporal order log2(e(dt) / e(dt/2)), errors in max norm against
/// a dt/16 run, fixed steps, two-mode datum.
inline double stepper_order(SimConfig cfg, double dt = 0.02, double t_end = 0.2) {
  cfg.s_monitor = cfg.params.surface_tension() ? 2.5 : 1.75;
  cfg.adaptive = false;
  cfg.t_end = t_end;
  cfg.snapshot_every = 0.0;
  const GridSpec& g = cfg.grid;
  const Profile f0 = Profile::sample(g, [&](double x) { return 0.2 * std::sin(g.xi(1) * x) + 0.05 * std::cos(g.xi(2) * x); });
  const auto solve = [&](double h) {
    SimConfig c = cfg;
    c.dt_init = c.dt_min = c.dt_max = h;
    auto r = run(c, f0);
    if (r.status != StepStatus::Finished) throw NumericFailure("order run ended with " + std::string(to_string(r.status)));
    return r.state.f;
  };
  const Profile ref = solve(dt / 16);
  return std::log2(max_abs(solve(dt) - ref) / max_abs(solve(dt / 2) - ref));
}

struct FlowResiduals {
  double darcy = 0.0;
  double divergence = 0.0;
};

/// Darcy and divergence residuals of the reconstructed flow around a smooth
/// interface with gravity-driven density jump, probed off the interface.
inline FlowResiduals flow_residuals(const GridSpec& g) {
  PhysParams params = PhysParams::no_tension(1.0);
  params.g = 1.0;
  params.rho_minus = 2.0;
  params.rho_plus = 1.0;
  params.k_perm = 1.5;
  params.validate();
  const Profile f = sine_profile(g, 0.2);
  const double L = g.half_width;
  const PressureField pf(f, params, 0.2 + 0.1 * L);
  const auto& bs = pf.biot_savart();
  const std::vector<Point> probes{{0.13 * L, 0.29 * L}, {-0.41 * L, 0.22 * L}, {0.7 * L, -0.25 * L}, {-0.19 * L, -0.35 * L}};
  double vmax = 0.0;
  for (Point p : probes) {
    const auto v = bs.at(p);
    vmax = std::max(vmax, std::hypot(v.vx, v.vy));
  }
  const double h = 1e-3 * L;
  const double k = params.k_perm / params.mu;
  FlowResiduals out;
  for (Point p : probes) {
    const auto v = bs.at(p);
    const double rho = bs.classify(p) == Side::Plus ? params.rho_plus : params.rho_minus;
    const double px = (pf.at({p.x + h, p.y}) - pf.at({p.x - h, p.y})) / (2 * h);
    const double py = (pf.at({p.x, p.y + h}) - pf.at({p.x, p.y - h})) / (2 * h);
    out.darcy = std::max(out.darcy, std::hypot(v.vx + k * px, v.vy + k * (py + rho * params.g)) / vmax);
    const double dvx = (bs.at({p.x + h, p.y}).vx - bs.at({p.x - h, p.y}).vx) / (2 * h);
    const double dvy = (bs.at({p.x, p.y + h}).vy - bs.at({p.x, p.y - h}).vy) / (2 * h);
    out.divergence = std::max(out.divergence, std::abs(dvx + dvy) / (std::abs(dvx) + std::abs(dvy)));
  }
  return out;
}

}  // namespace experiments

/// Operator identities and bounds on `grid` with seeded random data.
inline std::vector<CheckResult> run_identity_checks(const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  using namespace experiments;
  std::vector<CheckResult> out;
  const double pi = std::numbers::pi;

  out.push_back(guarded_check("a00_flat_is_minus_pi_hilbert", [&] { return flat_hilbert_error(grid, seed, true); }));
  out.push_back(guarded_check("b01_flat_is_pi_hilbert", [&] { return flat_hilbert_error(grid, seed + 1, false); }));

  out.push_back(guarded_check("phi_flat_symbol", [&] {
    std::mt19937_64 rng(seed + 2);
    const Profile h = random_band_limited(grid, rng, 8.0 / grid.n_points);
    const auto rule = QuadratureRule::midpoint(grid, 0, false);
    return symbol_error(phi_rhs(Profile(grid), h, rule).value, h, [&](double xi) { return cplx(-pi * std::abs(xi)); });
  }));
  out.push_back(guarded_check("phi_sigma_flat_cubic_symbol", [&] {
    std::mt19937_64 rng(seed + 3);
    const Profile h = random_band_limited(grid, rng, 8.0 / grid.n_points);
    const auto rule = QuadratureRule::midpoint(grid, 0, false);
    const auto r = phi_sigma_rhs(Profile(grid), h, PhysParams::with_tension(1.0, 1.0), rule);
    return symbol_error(r.split_parts->first, h, [&](double xi) { return cplx(-pi * std::pow(std::abs(xi), 3)); });
  }));

  const Profile wave = sine_profile(grid, 0.3);
  out.push_back(guarded_check("pv_log_identity_residual",
                              [&] { return pv_log_identity_residual(wave, QuadratureRule::midpoint(grid, 0, false)); }));
  out.push_back(guarded_check("pv_log_identity_contraction", [&] {
    const double coarse = pv_log_identity_residual(wave, QuadratureRule::midpoint(grid, 2, false));
    const double fine = pv_log_identity_residual(wave, QuadratureRule::midpoint(grid, 4, false));
    return fine / coarse;
  }));

  double excess = -std::numeric_limits<double>::infinity(), over = 0.0;
  const auto sampled = [&] {
    for (double beta : {pi, pi / 2, pi / 10})
      for (double alpha : {-5.0, -2.0, 0.0, 1.0, 5.0}) {
        const auto rep = verify_resolvent_inequality(FrozenSymbol{1, alpha, beta}, grid, 20);
        excess = std::max(excess, rep.max_lambda_ratio - rep.lambda_ratio_ceiling);
        over = std::max(over, rep.kappa0_measured / rep.kappa0_ceiling);
      }
  };
  out.push_back(guarded_check("resolvent_lambda_ratio_excess", [&] {
    sampled();
    return excess;
  }));
  out.push_back(guarded_check("resolvent_kappa0_over_ceiling", [&] { return over; }));
  out.push_back(guarded_check("resolvent_kappa0_order3", [&] {
    return verify_resolvent_inequality(FrozenSymbol{3, 0.0, pi}, grid, 20).kappa0_measured;
  }));

  out.push_back(guarded_check("a_tau_sup_over_ceiling", [&] {
    const auto rule = QuadratureRule::midpoint(grid, 0, false);
    std::mt19937_64 rng(seed + 4);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      Profile f = random_band_limited(grid, rng, 0.5);
      f *= 0.5 / max_abs(f);
      worst = std::max(worst, max_abs(a_tau_coefficient(f, 1.0, rule).value) / a_tau_sup_ceiling(f, 1.75));
    }
    return worst;
  }));
  out.push_back(guarded_check("a_tau_zero_at_tau_zero", [&] {
    std::mt19937_64 rng(seed + 5);
    return max_abs(a_tau_coefficient(random_band_limited(grid, rng, 0.5), 0.0, QuadratureRule::midpoint(grid)).value);
  }));

  sort_by_name(out);
  return out;
}

/// Evolution and field experiments on cfg.grid with cfg.seed. The experiment
/// designs (data, horizons) are fixed; the config supplies grid, seed,
/// physical constants and controller settings.
inline std::vector<CheckResult> run_physics_checks(const SimConfig& cfg) {
  cfg.validate();
  using namespace experiments;
  std::vector<CheckResult> out;
  const GridSpec& g = cfg.grid;

  out.push_back(guarded_check("kinematic_consistency_residual", [&] {
    return kinematic_consistency_residual(sine_profile(g, 0.2), PhysParams::no_tension(cfg.params.surface_tension() ? 1.0 : cfg.params.delta_rho),
                                          QuadratureRule::midpoint(g));
  }));
  out.push_back(guarded_check("kinematic_two_sided_gap", [&] {
    return kinematic_consistency(sine_profile(g, 0.2), PhysParams::no_tension(1.0), QuadratureRule::midpoint(g)).two_sided_gap;
  }));

  SimConfig plain = cfg;
  if (plain.params.surface_tension()) plain.params = PhysParams::no_tension(1.0);
  out.push_back(guarded_check("linear_rate_sigma0", [&] {
    return std::max(linear_rate_deviation(plain, 1), linear_rate_deviation(plain, 4));
  }));

  // xi_1^2 separates stable from unstable thetas for the lowest mode
  const double xi1 = g.xi(1);
  SimConfig stable = cfg;
  const bool cfg_stable = cfg.params.surface_tension() && cfg.params.theta > -xi1 * xi1;
  if (!cfg_stable) stable.params = PhysParams::with_tension(1.0, 1.0);
  stable.s_monitor = 2.5;
  out.push_back(guarded_check("linear_rate_tension_stable", [&] {
    return std::max(linear_rate_deviation(stable, 1), linear_rate_deviation(stable, 3));
  }));
  out.push_back(guarded_check("tension_all_modes_decay", [&] { return max_mode_growth(stable, cfg.seed); }));

  SimConfig unstable = cfg;
  unstable.params = PhysParams::with_tension(1.0, -2.4 * xi1 * xi1);
  unstable.s_monitor = 2.5;
  out.push_back(guarded_check("linear_rate_tension_unstable", [&] { return linear_rate_deviation(unstable, 1); }));

  out.push_back(guarded_check("stepper_order_deviation", [&] {
    return std::max(std::abs(stepper_order(plain) - 1.0), std::abs(stepper_order(stable) - 1.0));
  }));

  std::optional<FlowResiduals> flow;
  std::string flow_error;
  try {
    flow = flow_residuals(g);
  } catch (const std::exception& e) {
    flow_error = "error: " + std::string(e.what());
  }
  out.push_back(make_check("darcy_residual", flow ? flow->darcy : std::numeric_limits<double>::quiet_NaN(), flow_error));
  out.push_back(
      make_check("divergence_residual", flow ? flow->divergence : std::numeric_limits<double>::quiet_NaN(), flow_error));

  experiments::MediumDataRun medium;
  bool medium_ok = false;
  std::string medium_error;
  try {
    medium = medium_data_run(cfg);
    medium_ok = true;
  } catch (const std::exception& e) {
    medium_error = e.what();
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::string note = medium_ok ? "" : "error: " + medium_error;
  out.push_back(make_check("medium_data_not_finished", medium_ok && medium.status == StepStatus::Finished ? 0.0 : 1.0,
                           medium_ok ? "status " + std::string(to_string(medium.status)) + " at t = " + fmt17(medium.t_reached) : note));
  out.push_back(make_check("medium_data_hs_growth", medium_ok ? medium.hs_growth : nan, note));
  out.push_back(make_check("medium_data_wiener_growth", medium_ok ? medium.wiener_growth : nan, note));

  std::vector<double> slopes;
  std::string slope_error;
  try {
    slopes = smoothing_slopes(cfg, {0.1, 0.2, 0.4});
  } catch (const std::exception& e) {
    slope_error = "error: " + std::string(e.what());
  }
  if (slopes.size() == 3) {
    double loss = 0.0;
    for (std::size_t i = 1; i < slopes.size(); ++i)
      loss = std::max(loss, (std::abs(slopes[i - 1]) - std::abs(slopes[i])) / std::abs(slopes[i - 1]));
    const std::string s = "slopes " + fmt17(slopes[0]) + ", " + fmt17(slopes[1]) + ", " + fmt17(slopes[2]);
    out.push_back(make_check("smoothing_slope_t01", slopes[0], s));
    out.push_back(make_check("smoothing_slope_monotone", loss, s));
  } else {
    out.push_back(make_check("smoothing_slope_t01", nan, slope_error));
    out.push_back(make_check("smoothing_slope_monotone", nan, slope_error));
  }

  sort_by_name(out);
  return out;
}

}  // namespace muskat

#endif  // MUSKAT_VERIFY_HPP
