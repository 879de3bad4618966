#ifndef MUSKAT_TOLERANCES_HPP
#define MUSKAT_TOLERANCES_HPP

#include <array>
#include <string>
#include <string_view>

#include "muskat/error.hpp"

namespace muskat {

/// Every check threshold lives here so the verify suite and the acceptance
/// binary cannot drift apart. Bump the version whenever a value changes.
inline constexpr int kToleranceTableVersion = 1;

struct ToleranceEntry {
  std::string_view name;
  double tolerance;
  /// Mathematical statement checked; passed iff measured <= tolerance.
  std::string_view detail;
};

inline constexpr std::array<ToleranceEntry, 25> kToleranceTable{{
    {"a00_flat_is_minus_pi_hilbert", 1e-6, "A_{0,0}(0)[c] = -pi H c, worst relative L2 error over 20 seeded c"},
    {"a_tau_sup_over_ceiling", 1.0, "sup|a_tau| / 8(|f|^2/2 + |f'| [f']_{s-3/2}/(s-3/2)), s = 1.75, 10 seeded f"},
    {"a_tau_zero_at_tau_zero", 0.0, "a_tau == 0 for tau = 0, sup norm"},
    {"b01_flat_is_pi_hilbert", 1e-6, "B_{0,1}(0)[c] = pi H c, worst relative L2 error over 20 seeded c"},
    {"darcy_residual", 1e-3, "|v + (k/mu)(grad p + rho g e_y)| / max|v| at off-interface probes, centered differences"},
    {"divergence_residual", 1e-4, "|div v| / (|dvx/dx| + |dvy/dy|) at off-interface probes, centered differences"},
    {"kinematic_consistency_residual", 1e-4, "max |<v, (-f', 1)> - f_t| / max |f_t|, f = 0.2 sin(pi x/L), sigma = 0"},
    {"kinematic_two_sided_gap", 1e-8, "normal velocity from v_+ and v_- agrees"},
    {"linear_rate_sigma0", 0.02, "|gain / exp(m t) - 1| over one e-folding, m = -pi|xi|, amplitude 1e-6"},
    {"linear_rate_tension_stable", 0.02, "|gain / exp(m t) - 1|, m = -pi|xi|^3 - theta pi|xi|, decaying mode"},
    {"linear_rate_tension_unstable", 0.02, "|gain / exp(m t) - 1|, growing mode for theta < -xi_1^2"},
    {"medium_data_hs_growth", 2.0, "sup_t H^1.75 / H^1.75(0), sigma = 0, Wiener norm 0.10, t in [0, 10]"},
    {"medium_data_not_finished", 0.0, "medium-data run reaches t_end with status Finished (0) or not (1)"},
    {"medium_data_wiener_growth", 1.05, "sup_t Wiener / Wiener(0) on the same run"},
    {"phi_flat_symbol", 1e-5, "Phi(0)[h] against the multiplier -pi|xi|, relative spectral error"},
    {"phi_sigma_flat_cubic_symbol", 1e-5, "h''' part of Phi_sigma(0)[h] against -pi|xi|^3, relative spectral error"},
    {"pv_log_identity_contraction", 1.0 / 3.0, "residual(h_y/2) / residual(h_y) on the coarsest rules"},
    {"pv_log_identity_residual", 1e-6, "PV int d/ds (1/2) log(s^2 + (delta f)^2) ds = 0, f = 0.3 sin(pi x/L)"},
    {"resolvent_kappa0_order3", 10.0, "kappa0 for -pi|xi|^3 over the default (lambda, xi) samples"},
    {"resolvent_kappa0_over_ceiling", 1.0, "kappa0 / (sqrt(3(1+(a/b)^2)) + 1/min(1,b)), b in {pi, pi/2, pi/10}, |a| <= 5"},
    {"resolvent_lambda_ratio_excess", 1e-9, "max |lambda|/|lambda - m| - sqrt(3(1+(a/b)^2)) over all samples"},
    {"smoothing_slope_monotone", 0.10, "relative loss of tail-slope magnitude between t = 0.1, 0.2, 0.4"},
    {"smoothing_slope_t01", -1.0, "tail slope of log|c| against grid frequency xi dx at t = 0.1, rough H^1.6 datum"},
    {"stepper_order_deviation", 0.2, "|p - 1|, p = log2(e(dt) / e(dt/2)) against a dt/16 reference, fixed dt, both regimes"},
    {"tension_all_modes_decay", 0.0, "max_k log(|c_k(t)| / |c_k(0)|) for theta > -xi_1^2"},
}};

inline const ToleranceEntry& tolerance_entry(std::string_view name) {
  for (const auto& e : kToleranceTable)
    if (e.name == name) return e;
  throw InvalidInput("no tolerance registered for check '" + std::string(name) + "'");
}

inline double tolerance(std::string_view name) { return tolerance_entry(name).tolerance; }

}  // namespace muskat

#endif  // MUSKAT_TOLERANCES_HPP
