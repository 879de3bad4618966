#include <gtest/gtest.h>

#include <cmath>
#include <array>
#include <filesystem>
#include <random>

#include "muskat/grid.hpp"
#include "muskat/io.hpp"
#include "oracles.hpp"

using namespace muskat;

namespace {

Profile from_vec(const GridSpec& g, std::vector<double> v) { return Profile(g, std::move(v)); }

Profile random_smooth(const GridSpec& g, std::mt19937_64& rng) {
  return from_vec(g, oracle::smooth_profile({g.half_width, g.n_points}, rng, 0.3, 12));
}

}  // namespace

TEST(GridSpec, RejectsInvalidSizes) {
  EXPECT_THROW(GridSpec(1.0, 15), InvalidInput);
  EXPECT_THROW(GridSpec(1.0, 8), InvalidInput);
  EXPECT_THROW(GridSpec(0.0, 16), InvalidInput);
  GridSpec g(2.0, 16);
  EXPECT_DOUBLE_EQ(g.dx() * g.n_points, 4.0);
  EXPECT_DOUBLE_EQ(g.node(0), -2.0);
}

TEST(Spectrum, ZeroProfileHasZeroCoefficients) {
  GridSpec g(M_PI, 32);
  auto s = to_spectrum(Profile(g));
  for (auto c : s.coeffs()) EXPECT_EQ(std::abs(c), 0.0);
}

TEST(Spectrum, SingleCosineMode) {
  GridSpec g(3.0, 64);
  auto f = Profile::sample(g, [&](double x) { return std::cos(M_PI * x / g.half_width); });
  auto s = to_spectrum(f);
  for (int k = s.kmin(); k <= s.kmax(); ++k) {
    const double expect = (std::abs(k) == 1) ? 0.5 : 0.0;
    EXPECT_NEAR(std::abs(s.at(k) - cplx(expect)), 0.0, 1e-12) << k;
  }
  Spectrum t(g);
  t.at(1) = 0.5;
  t.at(-1) = 0.5;
  auto back = to_profile(t);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-12);
}

TEST(Spectrum, MatchesDirectDft) {
  GridSpec g(2.5, 64);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(64);
  for (auto& x : v) x = u(rng);
  auto s = to_spectrum(from_vec(g, v));
  auto ref = oracle::dft({g.half_width, g.n_points}, v);
  for (int k = s.kmin(); k <= s.kmax(); ++k)
    EXPECT_NEAR(std::abs(s.at(k) - ref[static_cast<std::size_t>(k + 32)]), 0.0, 1e-13);
}

TEST(Spectrum, RoundTrips) {
  GridSpec g(M_PI, 128);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_smooth(g, rng);
    auto back = to_profile(to_spectrum(f));
    EXPECT_LT(norm(back - f, NormSpec::linf()), 1e-12 * norm(f, NormSpec::linf()));

    Spectrum s(g);
    for (int k = 1; k < g.nyquist(); ++k) {
      cplx c(u(rng), u(rng));
      s.at(k) = c;
      s.at(-k) = std::conj(c);
    }
    s.at(0) = u(rng);
    s.at(s.kmin()) = u(rng);
    auto again = to_spectrum(to_profile(s));
    for (int k = s.kmin(); k <= s.kmax(); ++k) EXPECT_NEAR(std::abs(again.at(k) - s.at(k)), 0.0, 1e-12);
  }
}

TEST(Spectrum, RejectsAsymmetricAndNonFinite) {
  GridSpec g(M_PI, 16);
  Spectrum s(g);
  s.at(2) = cplx(1.0, 1.0);
  EXPECT_THROW(to_profile(s), SymmetryViolation);
  Profile f(g);
  f[3] = std::nan("");
  EXPECT_THROW(to_spectrum(f), InvalidInput);
}

TEST(Derivative, ConstantAndSine) {
  GridSpec g(2.0, 64);
  auto c = Profile::sample(g, [](double) { return 4.2; });
  EXPECT_LT(max_abs(spectral_derivative(c, 1)), 1e-13);
  const double k = M_PI / g.half_width;
  auto f = Profile::sample(g, [&](double x) { return std::sin(k * x); });
  auto d2 = spectral_derivative(f, 2);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(d2[i], -k * k * f[i], 1e-10);
  EXPECT_THROW(spectral_derivative(f, 5), InvalidInput);
}

TEST(Derivative, ThirdOrderMatchesFiniteDifferences) {
  // Sixth-order centered stencil for f''' on a smooth exponentially decaying spectrum.
  GridSpec g(M_PI, 256);
  auto f = Profile::sample(g, [](double x) { return 1.0 / (2.0 - std::cos(x)); });
  auto d3 = spectral_derivative(f, 3);
  const double h = g.dx();
  const std::array<double, 4> w{0.0, -488.0 / 240.0, 338.0 / 240.0, -72.0 / 240.0};
  const std::array<double, 4> w4{0, 0, 0, 7.0 / 240.0};
  double worst = 0;
  const int n = g.n_points;
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (int j = 1; j <= 3; ++j) {
      const double fp = f[static_cast<std::size_t>((i + j) % n)];
      const double fm = f[static_cast<std::size_t>((i - j + n) % n)];
      acc += w[static_cast<std::size_t>(j)] * (fp - fm);
    }
    const double fp4 = f[static_cast<std::size_t>((i + 4) % n)];
    const double fm4 = f[static_cast<std::size_t>((i - 4 + n) % n)];
    acc += w4[3] * (fp4 - fm4);
    acc /= h * h * h;
    worst = std::max(worst, std::abs(acc - d3[static_cast<std::size_t>(i)]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Derivative, OddOrderZeroesNyquist) {
  GridSpec g(M_PI, 16);
  auto f = Profile::sample(g, [&](double x) { return std::cos(g.xi(g.nyquist()) * x); });
  EXPECT_LT(max_abs(spectral_derivative(f, 1)), 1e-12);
  auto d2 = spectral_derivative(f, 2);
  const double xn = g.xi(g.nyquist());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(d2[i], -xn * xn * f[i], 1e-9);
}

TEST(DeltaKernel, ConstantPeriodAndIndexing) {
  GridSpec g(M_PI, 64);
  auto c = Profile::sample(g, [](double) { return 2.0; });
  EXPECT_NEAR(delta_kernel(c, 5, 0.123), 0.0, 1e-13);
  auto s = Profile::sample(g, [&](double x) { return std::sin(M_PI * x / g.half_width); });
  EXPECT_NEAR(delta_kernel(s, 7, g.length()), 0.0, 1e-13);
  std::mt19937_64 rng(5);
  auto f = random_smooth(g, rng);
  for (int m : {-70, -3, 0, 1, 17, 64}) {
    const std::size_t i = 9;
    const auto j = static_cast<std::size_t>(((9 - m) % 64 + 64) % 64);
    EXPECT_EQ(delta_kernel(f, 9, m * g.dx()), f[i] - f[j]);
  }
}

TEST(DeltaKernel, InterpolationAgreesWithSamplingOnGrid) {
  GridSpec g(M_PI, 64);
  std::mt19937_64 rng(8);
  auto f = random_smooth(g, rng);
  auto spec = to_spectrum(f);
  for (int m = -10; m <= 10; ++m) {
    const double y = m * g.dx();
    const double interp = f[4] - interpolate(spec, g.node(4) - y);
    EXPECT_NEAR(interp, delta_kernel(f, 4, y), 1e-10);
  }
  // off-grid: compare with the direct trigonometric sum
  auto ref = oracle::dft({g.half_width, g.n_points}, {f.values().begin(), f.values().end()});
  const double y = 0.37 * g.dx() + 0.2;
  EXPECT_NEAR(delta_kernel(f, 4, y), f[4] - oracle::interp({g.half_width, g.n_points}, ref, g.node(4) - y), 1e-12);
}

TEST(Norms, ZeroProfile) {
  GridSpec g(M_PI, 32);
  Profile z(g);
  for (auto spec : {NormSpec::l2(), NormSpec::linf(), NormSpec::sobolev(1.5), NormSpec::wiener(), NormSpec::holder(0.5)})
    EXPECT_EQ(norm(z, spec), 0.0);
}

TEST(Norms, SingleModeWiener) {
  GridSpec g(2.0, 64);
  const double a = -0.7;
  auto f = Profile::sample(g, [&](double x) { return a * std::cos(M_PI * x / g.half_width); });
  EXPECT_NEAR(norm(f, NormSpec::wiener()), std::abs(a) * M_PI / g.half_width, 1e-12);
}

TEST(Norms, ParsevalAndSobolevZero) {
  GridSpec g(3.0, 128);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(128);
    for (auto& x : v) x = u(rng);
    Profile f(g, v);
    auto s = to_spectrum(f);
    double acc = 0;
    for (auto c : s.coeffs()) acc += std::norm(c);
    const double l2 = norm(f, NormSpec::l2());
    EXPECT_NEAR(l2 * l2, g.length() * acc, 1e-10 * l2 * l2);
    EXPECT_NEAR(norm(f, NormSpec::sobolev(0.0)), l2, 1e-12 * l2);
  }
}

TEST(Norms, SobolevMonotoneAndWienerBound) {
  GridSpec g(M_PI, 128);
  // |||f||| <= C ||f||_{H^1.75} with C^2 = sum_k xi_k^2 (1+xi_k^2)^{-1.75} / (2L) by Cauchy-Schwarz
  double c2 = 0;
  for (int k = -64; k < 64; ++k) c2 += g.xi(k) * g.xi(k) * std::pow(1 + g.xi(k) * g.xi(k), -1.75);
  const double C = std::sqrt(c2 / g.length());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(128);
    for (auto& x : v) x = u(rng);
    Profile f(g, v);
    double prev = 0;
    for (double s : {-1.0, 0.0, 0.5, 1.75, 3.0}) {
      const double n = norm(f, NormSpec::sobolev(s));
      EXPECT_GE(n, prev);
      prev = n;
    }
    EXPECT_LE(norm(f, NormSpec::wiener()), C * norm(f, NormSpec::sobolev(1.75)) * (1 + 1e-12));
  }
}

TEST(Norms, HolderSeminormOfKink) {
  GridSpec g(1.0, 64);
  auto f = Profile::sample(g, [](double x) { return std::abs(x); });
  // |x| is Lipschitz: the theta-seminorm over separations <= L/2 is (L/2)^{1-theta}
  EXPECT_NEAR(norm(f, NormSpec::holder(0.5)), std::sqrt(0.5), 1e-12);
  EXPECT_THROW(NormSpec::holder(1.0), InvalidInput);
  EXPECT_THROW(NormSpec::sobolev(-2.0), InvalidInput);
}

TEST(Dealias, ProductOfResolvedModesIsExact) {
  GridSpec g(M_PI, 32);
  auto a = Profile::sample(g, [](double x) { return std::cos(5 * x); });
  auto b = Profile::sample(g, [](double x) { return std::sin(7 * x); });
  std::vector<Profile> in{a, b};
  auto prod = pointwise_dealiased(std::span<const Profile>(in), [](std::span<const double> v) { return v[0] * v[1]; });
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(prod[i], a[i] * b[i], 1e-13);
  // 12 + 10 = 22 > 16 aliases on the plain grid; the projection drops it instead
  auto c = Profile::sample(g, [](double x) { return std::cos(12 * x); });
  auto d = Profile::sample(g, [](double x) { return std::cos(10 * x); });
  std::vector<Profile> in2{c, d};
  auto p2 = pointwise_dealiased(std::span<const Profile>(in2), [](std::span<const double> v) { return v[0] * v[1]; });
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(p2[i], 0.5 * std::cos(2 * g.node(int(i))), 1e-13);
}

TEST(Io, ProfileCsvRoundTripIsExact) {
  GridSpec g(M_PI, 32);
  std::mt19937_64 rng(1);
  auto f = random_smooth(g, rng);
  const auto path = std::filesystem::temp_directory_path() / "muskat_profile_test.csv";
  write_profile_csv(path, f);
  auto back = read_profile_csv(path);
  ASSERT_EQ(back.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
  std::filesystem::remove(path);
}
