#ifndef MUSKAT_LINEAR_HPP
#define MUSKAT_LINEAR_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/kernels.hpp"

namespace muskat {

/// m(xi) = -beta |xi| + i alpha xi (order 1) or -beta |xi|^3 (order 3).
struct FrozenSymbol {
  int order = 1;
  double alpha = 0.0;
  double beta = std::numbers::pi;

  void validate() const {
    if (order != 1 && order != 3) throw InvalidInput("frozen symbol order must be 1 or 3");
    if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha))
      throw InvalidInput("frozen symbol needs finite alpha and beta > 0");
  }

  [[nodiscard]] cplx operator()(double xi) const {
    const double a = std::abs(xi);
    if (order == 3) return {-beta * a * a * a, 0.0};
    return {-beta * a, alpha * xi};
  }
};

inline FrozenSymbol freeze_symbol(const Profile& f, double tau, int x0_index, int order, const QuadratureRule& rule) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [0, 1]");
  if (x0_index < 0 || x0_index >= f.grid().n_points) throw InvalidInput("x0 index outside the grid");
  const auto i = static_cast<std::size_t>(x0_index);
  const double slope = tau * spectral_derivative(f, 1)[i];
  FrozenSymbol s;
  s.order = order;
  if (order == 1) {
    s.alpha = a_tau_coefficient(f, tau, rule).value[i];
    s.beta = std::numbers::pi / (1.0 + slope * slope);
  } else if (order == 3) {
    s.alpha = 0.0;
    s.beta = std::numbers::pi / std::pow(1.0 + slope * slope, 1.5);
  }
  s.validate();
  return s;
}

inline Profile apply_frozen(const FrozenSymbol& sym, const Profile& h) {
  sym.validate();
  return apply_multiplier(h, sym);
}

inline Spectrum apply_frozen(const FrozenSymbol& sym, const Spectrum& h) {
  sym.validate();
  Spectrum out(h.grid());
  for (int k = h.kmin(); k <= h.kmax(); ++k) out.at(k) = sym(h.grid().xi(k)) * h.at(k);
  return out;
}

/// Coefficients of u with (lambda - A) u = rhs. For non-real lambda the
/// solution is complex valued, so the result is a general coefficient array.
inline Spectrum solve_resolvent(const FrozenSymbol& sym, cplx lambda, const Spectrum& rhs) {
  sym.validate();
  if (!(lambda.real() > 0.0)) throw InvalidInput("resolvent needs Re(lambda) > 0");
  Spectrum out(rhs.grid());
  for (int k = rhs.kmin(); k <= rhs.kmax(); ++k) {
    const cplx den = lambda - sym(rhs.grid().xi(k));
    if (std::abs(den) < 1e-14)
      throw NearSingular("lambda - m(xi) vanishes at wavenumber " + std::to_string(k));
    out.at(k) = rhs.at(k) / den;
  }
  return out;
}

inline Spectrum solve_resolvent(const FrozenSymbol& sym, cplx lambda, const Profile& rhs) {
  return solve_resolvent(sym, lambda, to_spectrum(rhs));
}

struct ResolventSample {
  cplx lambda;
  double xi = 0.0;
  double ratio = 0.0;
};

struct ResolventReport {
  double kappa0_measured = 1.0;
  std::vector<cplx> lambda_samples;
  std::vector<double> xi_samples;
  ResolventSample worst_pair;
  /// Per lambda: the wavenumber with the largest ratio.
  std::vector<ResolventSample> worst_per_lambda;
  /// max |lambda| / |lambda - m| over all samples and its pointwise ceiling sqrt(3 (1 + (alpha/beta)^2)).
  double max_lambda_ratio = 0.0;
  double lambda_ratio_ceiling = 0.0;
  /// Ceiling for kappa0 (order 1): sqrt(3 (1 + (alpha/beta)^2)) + 1 / min(1, beta).
  double kappa0_ceiling = 0.0;
};

/// lambda = 1 + rho e^{i theta}: rho log-spaced in [1e-2, 1e4] (n_lambda values),
/// theta on `n_angles` points strictly inside (-pi/2, pi/2).
inline std::vector<cplx> resolvent_lambda_samples(int n_lambda, int n_angles = 15) {
  std::vector<cplx> out;
  out.emplace_back(1.0, 0.0);
  for (int a = 0; a < n_lambda; ++a) {
    const double rho = std::pow(10.0, -2.0 + 6.0 * a / std::max(1, n_lambda - 1));
    for (int b = 0; b < n_angles; ++b) {
      const double th = -std::numbers::pi / 2 + std::numbers::pi * (b + 0.5) / n_angles;
      out.push_back(cplx(1.0, 0.0) + std::polar(rho, th));
    }
  }
  return out;
}

inline ResolventReport verify_resolvent_inequality(const FrozenSymbol& sym, const GridSpec& grid, int n_lambda,
                                                   int n_angles = 15) {
  sym.validate();
  if (n_lambda < 20) throw InvalidInput("verify_resolvent_inequality needs n_lambda >= 20");
  ResolventReport rep;
  rep.lambda_samples = resolvent_lambda_samples(n_lambda, n_angles);
  for (int k = -grid.nyquist(); k < grid.nyquist(); ++k) rep.xi_samples.push_back(grid.xi(k));
  const double ab = sym.alpha / sym.beta;
  rep.lambda_ratio_ceiling = std::sqrt(3.0 * (1.0 + ab * ab));
  rep.kappa0_ceiling = rep.lambda_ratio_ceiling + 1.0 / std::min(1.0, sym.beta);
  rep.kappa0_measured = 0.0;
  for (const cplx lambda : rep.lambda_samples) {
    ResolventSample best{lambda, 0.0, -1.0};
    for (const double xi : rep.xi_samples) {
      const double q = 1.0 + xi * xi;
      const double w_lo = sym.order == 1 ? std::sqrt(q) : 1.0;
      const double w_hi = sym.order == 1 ? q : q * std::sqrt(q);
      const double dist = std::abs(lambda - sym(xi));
      const double ratio = (std::abs(lambda) * w_lo + w_hi) / (dist * w_lo);
      rep.max_lambda_ratio = std::max(rep.max_lambda_ratio, std::abs(lambda) / dist);
      if (ratio > best.ratio) best = {lambda, xi, ratio};
    }
    rep.worst_per_lambda.push_back(best);
    if (best.ratio > rep.kappa0_measured) {
      rep.kappa0_measured = best.ratio;
      rep.worst_pair = best;
    }
  }
  return rep;
}

}  // namespace muskat

#endif  // MUSKAT_LINEAR_HPP
