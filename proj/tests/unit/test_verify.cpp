#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "muskat/verify.hpp"

using namespace muskat;

namespace {

SimConfig small_config(int n = 128) {
  SimConfig c;
  c.params = PhysParams::no_tension(1.0);
  c.grid = GridSpec(2 * M_PI, n);
  return c;
}

const CheckResult& find(const std::vector<CheckResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST(ToleranceTable, SortedUniqueAndFinite) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < kToleranceTable.size(); ++i) {
    const auto& e = kToleranceTable[i];
    EXPECT_TRUE(seen.insert(e.name).second) << e.name;
    EXPECT_TRUE(std::isfinite(e.tolerance)) << e.name;
    EXPECT_FALSE(e.detail.empty()) << e.name;
    if (i > 0) {
      EXPECT_LT(kToleranceTable[i - 1].name, e.name);
    }
  }
  EXPECT_THROW(tolerance("no_such_check"), InvalidInput);
  EXPECT_DOUBLE_EQ(tolerance("a00_flat_is_minus_pi_hilbert"), 1e-6);
}

TEST(CheckResult, PassRuleAndNaN) {
  EXPECT_TRUE(make_check("a_tau_zero_at_tau_zero", 0.0).passed);
  EXPECT_FALSE(make_check("a_tau_zero_at_tau_zero", 1e-300).passed);
  EXPECT_TRUE(make_check("smoothing_slope_t01", -1.5).passed);
  EXPECT_FALSE(make_check("smoothing_slope_t01", -0.5).passed);
  EXPECT_FALSE(make_check("phi_flat_symbol", std::numeric_limits<double>::quiet_NaN()).passed);
  const auto r = guarded_check("phi_flat_symbol", []() -> double { throw NumericFailure("boom"); });
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.detail.find("boom"), std::string::npos);
}

TEST(Report, CsvLayout) {
  const std::vector<CheckResult> rs{make_check("phi_flat_symbol", 0.5), make_check("a_tau_zero_at_tau_zero", 0.0)};
  const std::string csv = report_csv(rs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,measured,tolerance,passed");
  EXPECT_NE(csv.find("phi_flat_symbol,0.5,1.0000000000000001e-05,false"), std::string::npos);
  EXPECT_NE(csv.find("a_tau_zero_at_tau_zero,0,0,true"), std::string::npos);
  EXPECT_EQ(report_text(rs).substr(0, 4), "FAIL");
}

TEST(IdentityChecks, PassAtModerateResolutionSortedByName) {
  const auto rs = run_identity_checks(GridSpec(2 * M_PI, 128), 0);
  ASSERT_EQ(rs.size(), 11u);
  for (std::size_t i = 1; i < rs.size(); ++i) EXPECT_LT(rs[i - 1].name, rs[i].name);
  for (const auto& r : rs) EXPECT_TRUE(r.passed) << r.name << " measured " << r.measured << " " << r.detail;
}

TEST(IdentityChecks, DeterministicForFixedSeed) {
  const GridSpec g(2 * M_PI, 64);
  EXPECT_EQ(report_csv(run_identity_checks(g, 3)), report_csv(run_identity_checks(g, 3)));
}

TEST(IdentityChecks, CoarseGridReportsWithoutThrowing) {
  std::vector<CheckResult> rs;
  EXPECT_NO_THROW(rs = run_identity_checks(GridSpec(2 * M_PI, 16), 1));
  EXPECT_EQ(rs.size(), 11u);
}

TEST(PhysicsChecks, RayleighTaylorViolationRejectedUpFront) {
  SimConfig c = small_config();
  c.params.delta_rho = -1.0;
  EXPECT_THROW(run_physics_checks(c), ConfigError);
}

TEST(PhysicsChecks, LinearRatesInBothRegimes) {
  const SimConfig c = small_config(64);
  EXPECT_LT(experiments::linear_rate_deviation(c, 2), 0.02);
  SimConfig t = c;
  t.params = PhysParams::with_tension(1.0, 0.5);
  EXPECT_LT(experiments::linear_rate_deviation(t, 1), 0.02);
  t.params = PhysParams::with_tension(1.0, -1.0);
  EXPECT_LT(experiments::linear_rate_deviation(t, 1), 0.02);
}

TEST(PhysicsChecks, StableThetaDecaysEveryMode) {
  // xi_1 = 1/2 on L = 2 pi, so theta = -0.2 > -xi_1^2 leaves no growing mode
  SimConfig c = small_config(64);
  c.params = PhysParams::with_tension(1.0, -0.2);
  EXPECT_LT(experiments::max_mode_growth(c, 5), 0.0);
  c.params = PhysParams::with_tension(1.0, -0.5);
  EXPECT_GT(experiments::max_mode_growth(c, 5), 0.0);
}

TEST(PhysicsChecks, FullSuitePassesOnSmallGrid) {
  const auto rs = run_physics_checks(small_config(128));
  EXPECT_EQ(rs.size(), 14u);
  for (const auto& r : rs) EXPECT_TRUE(r.passed) << r.name << " measured " << r.measured << " " << r.detail;
  EXPECT_EQ(find(rs, "medium_data_not_finished").measured, 0.0);
}
