#ifndef MUSKAT_KERNELS_HPP
#define MUSKAT_KERNELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/quadrature.hpp"

namespace muskat {

inline Profile hilbert_transform(const Profile& c) {
  detail::require_finite(c, "hilbert_transform");
  return apply_multiplier(c, [](double xi) {
    if (xi > 0) return cplx(0.0, -1.0);
    if (xi < 0) return cplx(0.0, 1.0);
    return cplx(0.0, 0.0);
  });
}

/// A_{m,n}(a_1..a_{n+1})[b_1..b_m, c]:
///   PV int prod_i (delta b_i / y) / prod_i (1 + (delta a_i / y)^2) * delta c / y dy.
struct MultiKernelSpec {
  std::vector<Profile> a_list;
  std::vector<Profile> b_list;

  [[nodiscard]] int n() const { return static_cast<int>(a_list.size()) - 1; }
  [[nodiscard]] int m() const { return static_cast<int>(b_list.size()); }
};

/// B_{n,m}(a_1..a_{n+m})[h]:
///   PV int h(x - y) / y * prod_{numer} (delta a / y) / prod_{denom} (1 + (delta a / y)^2) dy.
struct BKernelSpec {
  std::vector<Profile> numer_list;
  std::vector<Profile> denom_list;
};

struct KernelResult {
  Profile value;
  double error_estimate = 0.0;
};

namespace detail {

constexpr std::size_t kMaxDenominators = 8;

inline void require_grid(const GridSpec& g, const Profile& p) {
  if (!(p.grid() == g)) throw GridMismatch("operator argument lives on a different grid");
}

}  // namespace detail

inline KernelResult apply_A(const MultiKernelSpec& spec, const Profile& c, const QuadratureRule& rule) {
  if (spec.a_list.empty()) throw InvalidInput("A_{m,n} needs at least one denominator profile");
  if (spec.a_list.size() > detail::kMaxDenominators) throw InvalidInput("too many denominator profiles");
  const int p = spec.m() + 1;
  if (p > QuadratureRule::kMaxOrder) throw InvalidInput("A_{m,n}: m too large for the kernel engine");
  const GridSpec& g = rule.grid();
  std::vector<const Profile*> inputs;
  for (const auto& a : spec.a_list) inputs.push_back(&a);
  for (const auto& b : spec.b_list) inputs.push_back(&b);
  inputs.push_back(&c);
  for (const Profile* q : inputs) detail::require_grid(g, *q);
  const std::size_t na = spec.a_list.size();
  const std::size_t nb = spec.b_list.size();
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    std::array<double, detail::kMaxDenominators> d2{};
    for (std::size_t k = 0; k < na; ++k) {
      const double d = ctx.delta(k, i);
      d2[k] = d * d;
    }
    double num = ctx.delta(na + nb, i);
    for (std::size_t k = 0; k < nb; ++k) num *= ctx.delta(na + k, i);
    return std::array<double, 1>{num * ctx.kernel(p, std::span<const double>(d2.data(), na))};
  });
  return {Profile(g, std::move(out.values[0])), out.error_estimate};
}

inline KernelResult apply_B(const BKernelSpec& spec, const Profile& h, const QuadratureRule& rule) {
  if (spec.denom_list.size() > detail::kMaxDenominators) throw InvalidInput("too many denominator profiles");
  const int p = static_cast<int>(spec.numer_list.size()) + 1;
  if (p > QuadratureRule::kMaxOrder) throw InvalidInput("B_{n,m}: n too large for the kernel engine");
  const GridSpec& g = rule.grid();
  std::vector<const Profile*> inputs;
  for (const auto& a : spec.numer_list) inputs.push_back(&a);
  for (const auto& a : spec.denom_list) inputs.push_back(&a);
  inputs.push_back(&h);
  for (const Profile* q : inputs) detail::require_grid(g, *q);
  const std::size_t nn = spec.numer_list.size();
  const std::size_t nd = spec.denom_list.size();
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    std::array<double, detail::kMaxDenominators> d2{};
    for (std::size_t k = 0; k < nd; ++k) {
      const double d = ctx.delta(nn + k, i);
      d2[k] = d * d;
    }
    double num = ctx.there[nn + nd][i];
    for (std::size_t k = 0; k < nn; ++k) num *= ctx.delta(k, i);
    return std::array<double, 1>{num * ctx.kernel(p, std::span<const double>(d2.data(), nd))};
  });
  return {Profile(g, std::move(out.values[0])), out.error_estimate};
}

/// Random mean-zero test function band-limited to |k| <= N/4, unit L2 norm.
inline Profile random_band_limited(const GridSpec& grid, std::mt19937_64& rng, double decay = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid);
  const int kcut = grid.n_points / 4;
  for (int k = 1; k <= kcut; ++k) {
    const double w = std::exp(-decay * k);
    const cplx c(normal(rng) * w, normal(rng) * w);
    s.at(k) = c;
    s.at(-k) = std::conj(c);
  }
  Profile f = to_profile(s);
  const double n2 = norm(f, NormSpec::l2());
  if (n2 > 0) f *= 1.0 / n2;
  return f;
}

/// Randomized lower estimate of the L2 operator norm of h -> B[h].
inline double estimate_B_opnorm(const BKernelSpec& spec, const QuadratureRule& rule, int trials,
                                std::uint64_t seed = 0) {
  if (trials < 10) throw InvalidInput("estimate_B_opnorm needs at least 10 trials");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Profile h = random_band_limited(rule.grid(), rng);
    const auto r = apply_B(spec, h, rule);
    best = std::max(best, norm(r.value, NormSpec::l2()));
  }
  return best;
}

/// a_tau(x) = PV int y / (y^2 + tau^2 (delta_{[x,y]} f)^2) dy, evaluated on
/// pairs (y, -y) through the even integrand
///   I(x, y) = tau^2 D1 D2 y / ((y^2 + tau^2 A^2)(y^2 + tau^2 B^2)),
///   D1 = f(x+y) - f(x-y), D2 = f(x+y) - 2f(x) + f(x-y),
///   A = delta_{[x,y]} f, B = delta_{[x,-y]} f,
/// so a_tau = (1/2) int_R I dy.
inline KernelResult a_tau_coefficient(const Profile& f, double tau, const QuadratureRule& rule) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [0, 1]");
  const GridSpec& g = rule.grid();
  detail::require_grid(g, f);
  if (tau == 0.0) return {Profile(g), 0.0};
  const double t2 = tau * tau;
  // reflected(x) = f(-x), so reflected(x_{N-i} - y) = f(x_i + y)
  const auto n = g.size();
  Profile reflected(g);
  for (std::size_t i = 0; i < n; ++i) reflected[i] = f[(n - i) % n];
  std::vector<const Profile*> inputs{&f, &reflected};
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double fx = ctx.here[0][i];
    const double fm = ctx.there[0][i];
    const double fp = ctx.there[1][(n - i) % n];
    const double D1 = fp - fm;
    const double D2 = fp - 2.0 * fx + fm;
    const double A = fx - fm;
    const double B = fx - fp;
    return std::array<double, 1>{0.5 * t2 * D1 * D2 * ctx.kernel(3, {t2 * A * A, t2 * B * B})};
  });
  return {Profile(g, std::move(out.values[0])), out.error_estimate};
}

/// The same coefficient by direct symmetric pairing of y / (y^2 + tau^2 (delta f)^2).
inline KernelResult a_tau_direct(const Profile& f, double tau, const QuadratureRule& rule) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [0, 1]");
  const GridSpec& g = rule.grid();
  detail::require_grid(g, f);
  const double t2 = tau * tau;
  std::vector<const Profile*> inputs{&f};
  auto out = integrate<1>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double d = ctx.delta(0, i);
    return std::array<double, 1>{ctx.kernel(1, {t2 * d * d})};
  });
  return {Profile(g, std::move(out.values[0])), out.error_estimate};
}

/// Ceiling for sup |a_tau| from the pointwise bound on the integrand:
///   8 (|f|_inf^2 int_1^inf y^-3 dy + |f'|_inf [f']_{s-3/2} int_0^1 y^{s-5/2} dy), 3/2 < s < 5/2.
inline double a_tau_sup_ceiling(const Profile& f, double s) {
  if (!(s > 1.5 && s < 2.5)) throw InvalidInput("a_tau ceiling needs 3/2 < s < 5/2");
  const Profile fp = spectral_derivative(f, 1);
  const double sup = max_abs(f);
  return 8.0 * (0.5 * sup * sup + max_abs(fp) * norm(fp, NormSpec::holder(s - 1.5)) / (s - 1.5));
}

}  // namespace muskat

#endif  // MUSKAT_KERNELS_HPP
