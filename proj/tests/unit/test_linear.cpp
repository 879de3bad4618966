#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "muskat/linear.hpp"
#include "oracles.hpp"

using namespace muskat;

namespace {

oracle::Grid og(const GridSpec& g) { return {g.half_width, g.n_points}; }

Profile smooth(const GridSpec& g, std::uint64_t seed, double amp = 0.2) {
  std::mt19937_64 rng(seed);
  return Profile(g, oracle::smooth_profile(og(g), rng, amp));
}

/// Brute-force max of the weighted resolvent ratio over a dense (lambda, xi)
/// lattice; with moduli = 19 m + 1 and angles = 15 m' (m' odd) it contains
/// the library's default samples.
double dense_ratio(const FrozenSymbol& s, const GridSpec& g, int moduli, int angles) {
  double best = 0;
  std::vector<oracle::cplx> lams{1.0};
  for (int a = 0; a < moduli; ++a) {
    const double rho = std::pow(10.0, -2.0 + 6.0 * a / (moduli - 1));
    for (int b = 0; b < angles; ++b) lams.push_back(1.0 + std::polar(rho, -M_PI / 2 + M_PI * (b + 0.5) / angles));
  }
  for (const oracle::cplx lam : lams) {
      for (int k = -g.n_points / 2; k < g.n_points / 2; ++k) {
        const double xi = M_PI * k / g.half_width;
        const oracle::cplx m = s.order == 1 ? oracle::cplx(-s.beta * std::abs(xi), s.alpha * xi)
                                            : oracle::cplx(-s.beta * std::pow(std::abs(xi), 3), 0);
        const double q = 1 + xi * xi;
        const double lo = s.order == 1 ? std::sqrt(q) : 1.0;
        const double hi = s.order == 1 ? q : std::pow(q, 1.5);
      best = std::max(best, (std::abs(lam) * lo + hi) / (std::abs(lam - m) * lo));
    }
  }
  return best;
}

}  // namespace

TEST(FrozenSymbol, FlatOrZeroTauGivesLeadingSymbol) {
  GridSpec g(M_PI, 64);
  auto rule = QuadratureRule::midpoint(g);
  auto s = freeze_symbol(Profile(g), 1.0, 5, 1, rule);
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_DOUBLE_EQ(s.beta, M_PI);
  auto t = freeze_symbol(smooth(g, 1), 0.0, 9, 1, rule);
  EXPECT_EQ(t.alpha, 0.0);
  EXPECT_DOUBLE_EQ(t.beta, M_PI);
  EXPECT_DOUBLE_EQ(freeze_symbol(smooth(g, 1), 0.0, 9, 3, rule).beta, M_PI);
}

TEST(FrozenSymbol, UnitSlopeOrderThree) {
  GridSpec g(M_PI, 64);
  auto rule = QuadratureRule::midpoint(g);
  auto f = Profile::sample(g, [](double x) { return std::sin(x); });  // f'(0) = 1
  const int x0 = g.n_points / 2;
  ASSERT_NEAR(g.node(x0), 0.0, 1e-15);
  auto s = freeze_symbol(f, 1.0, x0, 3, rule);
  EXPECT_NEAR(s.beta, M_PI / std::pow(2.0, 1.5), 1e-13);
  EXPECT_EQ(s.alpha, 0.0);
  auto s1 = freeze_symbol(f, 1.0, x0, 1, rule);
  EXPECT_NEAR(s1.beta, M_PI / 2, 1e-13);
}

TEST(FrozenSymbol, RejectsBadInputs) {
  GridSpec g(M_PI, 64);
  auto rule = QuadratureRule::midpoint(g);
  EXPECT_THROW(freeze_symbol(Profile(g), 1.5, 0, 1, rule), InvalidInput);
  EXPECT_THROW(freeze_symbol(Profile(g), 0.5, 64, 1, rule), InvalidInput);
  EXPECT_THROW(freeze_symbol(Profile(g), 0.5, 0, 2, rule), InvalidInput);
  EXPECT_THROW(apply_frozen(FrozenSymbol{1, 0.0, 0.0}, Profile(g)), InvalidInput);
}

TEST(ApplyFrozen, SingleModes) {
  GridSpec g(3.0, 64);
  const double k1 = M_PI / g.half_width;
  auto c = Profile::sample(g, [&](double x) { return std::cos(k1 * x); });
  auto out = apply_frozen(FrozenSymbol{1, 0.0, M_PI}, c);
  EXPECT_LT(max_abs(out + (M_PI * k1) * c), 1e-12);
  auto s = Profile::sample(g, [&](double x) { return std::sin(2 * k1 * x); });
  auto out3 = apply_frozen(FrozenSymbol{3, 0.0, M_PI}, s);
  EXPECT_LT(max_abs(out3 + (M_PI * std::pow(2 * k1, 3)) * s), 1e-10);
  auto one = Profile::sample(g, [](double) { return 2.0; });
  EXPECT_LT(max_abs(apply_frozen(FrozenSymbol{1, 1.5, 1.0}, one)), 1e-15);
  // drift: i alpha xi acting on cos gives -alpha k sin
  auto drift = apply_frozen(FrozenSymbol{1, 0.5, 1.0}, c);
  auto ref = (-1.0 * k1) * c + (-0.5 * k1) * Profile::sample(g, [&](double x) { return std::sin(k1 * x); });
  EXPECT_LT(max_abs(drift - ref), 1e-12);
}

TEST(SolveResolvent, ScalarModeArithmetic) {
  GridSpec g(M_PI, 64);
  const int k = 3;
  auto h = Profile::sample(g, [&](double x) { return std::cos(k * x); });
  auto u = solve_resolvent(FrozenSymbol{}, {1.0, 0.0}, h);
  EXPECT_LT(max_abs(to_profile(u) - (1.0 / (1.0 + M_PI * k)) * h), 1e-14);
  auto z = solve_resolvent(FrozenSymbol{}, {2.0, 1.0}, Profile(g));
  for (int j = z.kmin(); j <= z.kmax(); ++j) EXPECT_EQ(std::abs(z.at(j)), 0.0);
}

TEST(SolveResolvent, InverseIdentityBothOrders) {
  GridSpec g(M_PI, 64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int trial = 0; trial < 50; ++trial) {
    FrozenSymbol s{trial % 2 == 0 ? 1 : 3, u(rng), 0.1 + std::abs(u(rng))};
    const cplx lambda(1.0 + std::abs(u(rng)), u(rng) * 10);
    auto rhs = to_spectrum(smooth(g, 100 + trial));
    auto sol = solve_resolvent(s, lambda, rhs);
    auto back = apply_frozen(s, sol);
    double err = 0, scale = 0;
    for (int k = rhs.kmin(); k <= rhs.kmax(); ++k) {
      err = std::max(err, std::abs(lambda * sol.at(k) - back.at(k) - rhs.at(k)));
      scale = std::max(scale, std::abs(rhs.at(k)));
    }
    EXPECT_LT(err, 1e-12 * scale);
  }
}

TEST(SolveResolvent, Errors) {
  GridSpec g(M_PI, 64);
  auto rhs = smooth(g, 1);
  EXPECT_THROW(solve_resolvent(FrozenSymbol{}, {0.0, 1.0}, rhs), InvalidInput);
  EXPECT_THROW(solve_resolvent(FrozenSymbol{}, {1e-16, 0.0}, rhs), NearSingular);
}

TEST(Semigroup, DecaysAtEveryMode) {
  GridSpec g(M_PI, 64);
  for (const FrozenSymbol& s : {FrozenSymbol{1, 2.0, 0.5}, FrozenSymbol{3, 0.0, 0.3}}) {
    for (double t : {1e-3, 0.1, 1.0}) {
      for (int k = -32; k < 32; ++k) {
        const double mod = std::abs(std::exp(t * s(g.xi(k))));
        if (k == 0)
          EXPECT_DOUBLE_EQ(mod, 1.0);
        else
          EXPECT_LT(mod, 1.0);
      }
    }
  }
}

TEST(ResolventInequality, PointwiseBoundAndFiniteness) {
  GridSpec g(2 * M_PI, 128);
  for (double beta : {M_PI, M_PI / 2, M_PI / 10}) {
    for (double alpha : {-5.0, -1.0, 0.0, 2.5, 5.0}) {
      FrozenSymbol s{1, alpha, beta};
      auto rep = verify_resolvent_inequality(s, g, 20);
      EXPECT_TRUE(std::isfinite(rep.kappa0_measured));
      EXPECT_GE(rep.kappa0_measured, 1.0);
      EXPECT_LE(rep.max_lambda_ratio, rep.lambda_ratio_ceiling + 1e-9);
      EXPECT_LE(rep.kappa0_measured, rep.kappa0_ceiling);
      EXPECT_EQ(rep.worst_per_lambda.size(), rep.lambda_samples.size());
      EXPECT_EQ(rep.lambda_samples.size(), 20u * 15u + 1u);
      EXPECT_EQ(rep.xi_samples.size(), 128u);
    }
  }
  auto r3 = verify_resolvent_inequality(FrozenSymbol{3, 0.0, M_PI}, g, 20);
  EXPECT_TRUE(std::isfinite(r3.kappa0_measured));
  EXPECT_LT(r3.kappa0_measured, 10.0);
  EXPECT_THROW(verify_resolvent_inequality(FrozenSymbol{}, g, 10), InvalidInput);
}

TEST(ResolventInequality, MatchesDenseSamplerAndGrowsWithInverseBeta) {
  GridSpec g(M_PI, 64);
  double prev = 0, first = 0;
  for (double beta : {M_PI, M_PI / 4, 0.1, 0.01}) {
    FrozenSymbol s{1, 0.0, beta};
    auto rep = verify_resolvent_inequality(s, g, 20);
    const double dense = dense_ratio(s, g, 191, 135);
    // the default samples are a subset of the dense lattice
    EXPECT_LE(rep.kappa0_measured, dense * (1 + 1e-12));
    EXPECT_GT(rep.kappa0_measured, 0.9 * dense);
    // nondecreasing in 1/beta; the lambda = 1, xi = 0 floor of 2 binds while beta >= 1
    EXPECT_GE(rep.kappa0_measured, prev);
    if (prev == 0) first = rep.kappa0_measured;
    prev = rep.kappa0_measured;
  }
  EXPECT_GT(prev, first);
  auto r3 = verify_resolvent_inequality(FrozenSymbol{3, 0.0, M_PI}, g, 20);
  const double d3 = dense_ratio(FrozenSymbol{3, 0.0, M_PI}, g, 191, 135);
  EXPECT_LE(r3.kappa0_measured, d3 * (1 + 1e-12));
  EXPECT_LT(d3, 10.0);
}
