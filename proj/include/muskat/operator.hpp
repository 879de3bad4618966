#ifndef MUSKAT_OPERATOR_HPP
#define MUSKAT_OPERATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/kernels.hpp"
#include "muskat/quadrature.hpp"

namespace muskat {

/// Physical constants. Without surface tension (sigma = 0) the interface is
/// driven by delta_rho > 0 alone; with sigma > 0 only theta = delta_rho / sigma
/// enters the rescaled equation.
struct PhysParams {
  double sigma = 0.0;
  double delta_rho = 1.0;
  double theta = 0.0;
  double k_perm = 1.0;
  double mu = 1.0;
  double g = 0.0;
  double rho_minus = 0.0;
  double rho_plus = 0.0;

  [[nodiscard]] bool surface_tension() const { return sigma > 0.0; }

  /// Factor between physical and rescaled time: t_phys = t_rescaled / time_scale().
  [[nodiscard]] double time_scale() const {
    return (surface_tension() ? sigma : delta_rho) * k_perm / (2.0 * std::numbers::pi * mu);
  }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(sigma) || !finite(delta_rho) || !finite(theta) || !finite(k_perm) || !finite(mu) || !finite(g) ||
        !finite(rho_minus) || !finite(rho_plus))
      throw ConfigError("physical parameters must be finite");
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (!(k_perm > 0.0)) throw ConfigError("k_perm must be > 0");
    if (!(mu > 0.0)) throw ConfigError("mu must be > 0");
    if (g < 0.0 || rho_minus < 0.0 || rho_plus < 0.0) throw ConfigError("g and densities must be >= 0");
    if (!surface_tension() && !(delta_rho > 0.0))
      throw ConfigError("regime violation: sigma = 0 requires the Rayleigh-Taylor condition Δ_ρ > 0 (delta_rho = " +
                        std::to_string(delta_rho) + ")");
    if (surface_tension()) {
      const double expect = delta_rho / sigma;
      if (std::abs(theta - expect) > 1e-12 * std::max(1.0, std::abs(expect)))
        throw ConfigError("theta must equal delta_rho / sigma");
    }
    if (g > 0.0 && (rho_minus > 0.0 || rho_plus > 0.0)) {
      const double expect = g * (rho_minus - rho_plus);
      if (std::abs(delta_rho - expect) > 1e-12 * std::max(1.0, std::abs(expect)))
        throw ConfigError("delta_rho must equal g * (rho_minus - rho_plus)");
    }
  }

  static PhysParams no_tension(double delta_rho) {
    PhysParams p;
    p.sigma = 0.0;
    p.delta_rho = delta_rho;
    p.validate();
    return p;
  }

  static PhysParams with_tension(double sigma, double theta) {
    PhysParams p;
    p.sigma = sigma;
    p.theta = theta;
    p.delta_rho = theta * sigma;
    p.validate();
    return p;
  }
};

struct RhsEvaluation {
  Profile value;
  double quadrature_error = 0.0;
  std::optional<std::pair<Profile, Profile>> split_parts;
};

inline Profile curvature(const Profile& f) {
  std::vector<Profile> d{spectral_derivative(f, 1), spectral_derivative(f, 2)};
  return pointwise_dealiased(std::span<const Profile>(d), [](std::span<const double> v) {
    return v[1] / std::pow(1.0 + v[0] * v[0], 1.5);
  });
}

/// (kappa(f))' = f''' / (1+f'^2)^{3/2} - 3 f' f''^2 / (1+f'^2)^{5/2}
inline Profile curvature_prime(const Profile& f) {
  std::vector<Profile> d{spectral_derivative(f, 1), spectral_derivative(f, 2), spectral_derivative(f, 3)};
  return pointwise_dealiased(std::span<const Profile>(d), [](std::span<const double> v) {
    const double q = 1.0 + v[0] * v[0];
    return v[2] / std::pow(q, 1.5) - 3.0 * v[0] * v[1] * v[1] / std::pow(q, 2.5);
  });
}

/// Phi(f)[h] = A_{0,0}(f)[h'].
inline RhsEvaluation phi_rhs(const Profile& f, const Profile& h, const QuadratureRule& rule) {
  f.require_same_grid(h);
  auto r = apply_A({{f}, {}}, spectral_derivative(h, 1), rule);
  return {std::move(r.value), r.error_estimate, std::nullopt};
}

/// Phi_sigma(f)[h] = f' B_{1,1}(f,f)[g_h] + B_{0,1}(f)[g_h] + theta A_{0,0}(f)[h'],
/// g_h = h''' / (1+f'^2)^{3/2} - 3 f' f'' h'' / (1+f'^2)^{5/2}.
/// Both B terms share one pass; split_parts holds the h''' part and the rest.
inline RhsEvaluation phi_sigma_rhs(const Profile& f, const Profile& h, const PhysParams& params,
                                   const QuadratureRule& rule) {
  if (!params.surface_tension()) throw ConfigError("phi_sigma_rhs requires sigma > 0");
  f.require_same_grid(h);
  const Profile fp = spectral_derivative(f, 1);
  const Profile fpp = spectral_derivative(f, 2);
  const Profile hp = spectral_derivative(h, 1);
  const Profile hpp = spectral_derivative(h, 2);
  const Profile hppp = spectral_derivative(h, 3);
  std::vector<Profile> a{fp, hppp};
  const Profile g1 = pointwise_dealiased(std::span<const Profile>(a), [](std::span<const double> v) {
    return v[1] / std::pow(1.0 + v[0] * v[0], 1.5);
  });
  std::vector<Profile> b{fp, fpp, hpp};
  const Profile g2 = pointwise_dealiased(std::span<const Profile>(b), [](std::span<const double> v) {
    return -3.0 * v[0] * v[1] * v[2] / std::pow(1.0 + v[0] * v[0], 2.5);
  });
  const double theta = params.theta;
  std::vector<const Profile*> inputs{&f, &g1, &g2, &hp};
  const auto fpv = fp.values();
  auto out = integrate<2>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double d = ctx.delta(0, i);
    const double d2 = d * d;
    const double k1 = ctx.kernel(1, {d2});
    const double k2 = ctx.kernel(2, {d2});
    const double w = fpv[i] * d * k2 + k1;
    return std::array<double, 2>{w * ctx.there[1][i], w * ctx.there[2][i] + theta * ctx.delta(3, i) * k1};
  });
  const GridSpec& g = rule.grid();
  Profile part1(g, std::move(out.values[0]));
  Profile part2(g, std::move(out.values[1]));
  Profile value = part1 + part2;
  return {std::move(value), out.error_estimate, std::make_pair(std::move(part1), std::move(part2))};
}

/// Right-hand side of the rescaled evolution f_t = Phi_*(f)[f] for either regime.
inline RhsEvaluation evolution_rhs(const Profile& f, const PhysParams& params, const QuadratureRule& rule) {
  return params.surface_tension() ? phi_sigma_rhs(f, f, params, rule) : phi_rhs(f, f, rule);
}

/// First Gateaux derivative of f -> Phi(f)[h] at f0 in direction f1:
///   PV int (delta h'/y)(delta f1/y) phi'(delta f0/y) dy, phi'(u) = -2u/(1+u^2)^2.
inline KernelResult gateaux_phi(const Profile& f0, const Profile& f1, const Profile& h, const QuadratureRule& rule) {
  f0.require_same_grid(f1);
  f0.require_same_grid(h);
  const Profile hp = spectral_derivative(h, 1);
  std::vector<const Profile*> inputs{&f0, &f1, &hp};
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double d0 = ctx.delta(0, i);
    const double d0s = d0 * d0;
    return std::array<double, 1>{-2.0 * ctx.delta(2, i) * ctx.delta(1, i) * d0 * ctx.kernel(3, {d0s, d0s})};
  });
  return {Profile(rule.grid(), std::move(out.values[0])), out.error_estimate};
}

/// x -> PV int s/(s^2 + (delta f)^2) ds + PV int delta f f'(x-s)/(s^2 + (delta f)^2) ds,
/// the s-derivative of (1/2) log(s^2 + (delta f)^2) integrated over the line.
inline KernelResult pv_log_identity(const Profile& f, const QuadratureRule& rule) {
  const Profile fp = spectral_derivative(f, 1);
  std::vector<const Profile*> inputs{&f, &fp};
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double d = ctx.delta(0, i);
    const double d2 = d * d;
    return std::array<double, 1>{ctx.kernel(1, {d2}) + d * ctx.there[1][i] * ctx.kernel(2, {d2})};
  });
  return {Profile(rule.grid(), std::move(out.values[0])), out.error_estimate};
}

inline double pv_log_identity_residual(const Profile& f, const QuadratureRule& rule) {
  return max_abs(pv_log_identity(f, rule).value);
}

}  // namespace muskat

#endif  // MUSKAT_OPERATOR_HPP
