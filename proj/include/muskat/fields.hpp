#ifndef MUSKAT_FIELDS_HPP
#define MUSKAT_FIELDS_HPP

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/io.hpp"
#include "muskat/operator.hpp"
#include "muskat/quadrature.hpp"

namespace muskat {

/// omega = (k/mu) (sigma kappa(f) - delta_rho f)'
struct VorticityDensity {
  Profile profile;
  double scale = 1.0;
};

inline VorticityDensity vorticity_density(const Profile& f, const PhysParams& params) {
  params.validate();
  Profile drive = (-params.delta_rho) * f;
  if (params.surface_tension()) drive += params.sigma * curvature(f);
  const double scale = params.k_perm / params.mu;
  return {scale * spectral_derivative(drive, 1), scale};
}

struct Velocity {
  double vx = 0.0;
  double vy = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Side { Minus, Plus, NearInterface };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Minus: return "minus";
    case Side::Plus: return "plus";
    case Side::NearInterface: return "interface";
  }
  return "?";
}

namespace detail {

/// Band-limited resampling onto `factor` times as many nodes.
inline Profile refine_profile(const Profile& p, int factor) {
  if (factor == 1) return p;
  const GridSpec& g = p.grid();
  const int n = g.n_points;
  const GridSpec fine(g.half_width, n * factor);
  const auto s = to_spectrum(p);
  Spectrum big(fine);
  for (int k = -n / 2 + 1; k < n / 2; ++k) big.at(k) = s.at(k);
  big.at(-n / 2) = 0.5 * s.at(-n / 2).real();
  big.at(n / 2) = 0.5 * s.at(-n / 2).real();
  return to_profile(big);
}

/// cot(w), stable for large |Im w|.
inline cplx cot(cplx w) {
  if (w.imag() >= 0) {
    const cplx u = std::exp(cplx(0, 2) * w);
    return cplx(0, 1) * (u + 1.0) / (u - 1.0);
  }
  const cplx u = std::exp(cplx(0, -2) * w);
  return cplx(0, 1) * (1.0 + u) / (1.0 - u);
}

}  // namespace detail

/// Off-interface velocity of a periodic vortex sheet carried by the curve
/// s -> (s, f(s)): vx - i vy = (-i/2pi) int omega(s) (pi/2L) cot(pi (z - zeta(s)) / 2L) ds,
/// the full sum over periodic images of (V1). Trapezoid rule on the sheet,
/// resampled `refine` times finer. Targets closer than 2 dx to the curve are rejected.
class BiotSavart {
 public:
  BiotSavart(const Profile& f, const VorticityDensity& omega, int refine = 4)
      : grid_(f.grid()),
        f_fine_(detail::refine_profile(f, refine)),
        w_fine_(detail::refine_profile(omega.profile, refine)),
        spectrum_(to_spectrum(f)) {
    f.require_same_grid(omega.profile);
    if (refine < 1) throw InvalidInput("refinement factor must be >= 1");
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }

  /// Distance from (x, y) to the sampled curve, periodic in x.
  [[nodiscard]] double distance_to_curve(Point p) const {
    const GridSpec& g = f_fine_.grid();
    const double period = g.length();
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.n_points; ++j) {
      double dx = std::remainder(p.x - g.node(j), period);
      const double dy = p.y - f_fine_[static_cast<std::size_t>(j)];
      best = std::min(best, std::hypot(dx, dy));
    }
    return best;
  }

  [[nodiscard]] double interface_height(double x) const { return interpolate(spectrum_, x); }

  [[nodiscard]] Side classify(Point p) const {
    if (distance_to_curve(p) < 2.0 * grid_.dx()) return Side::NearInterface;
    return p.y > interface_height(p.x) ? Side::Plus : Side::Minus;
  }

  [[nodiscard]] Velocity at(Point p) const {
    if (distance_to_curve(p) < 2.0 * grid_.dx())
      throw NearInterface("target (" + fmt17(p.x) + ", " + fmt17(p.y) +
                          ") lies within 2 dx of the interface; use interface_traces there");
    return unchecked(p);
  }

  /// No distance check; accuracy degrades within a few fine spacings of the curve.
  [[nodiscard]] Velocity unchecked(Point p) const {
    const GridSpec& g = f_fine_.grid();
    const double a = std::numbers::pi / g.length();
    const cplx z(p.x, p.y);
    cplx acc = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
      const auto i = static_cast<std::size_t>(j);
      const cplx zeta(g.node(j), f_fine_[i]);
      acc += w_fine_[i] * detail::cot(a * (z - zeta));
    }
    const cplx conj_v = cplx(0, -1) / (2.0 * std::numbers::pi) * a * g.dx() * acc;
    return {conj_v.real(), -conj_v.imag()};
  }

 private:
  GridSpec grid_;
  Profile f_fine_;
  Profile w_fine_;
  Spectrum spectrum_;
};

inline std::vector<Velocity> biot_savart(const Profile& f, const VorticityDensity& omega,
                                         const std::vector<Point>& targets, int refine = 4) {
  const BiotSavart bs(f, omega, refine);
  std::vector<Velocity> out;
  out.reserve(targets.size());
  for (const Point& p : targets) out.push_back(bs.at(p));
  return out;
}

struct VectorProfile {
  Profile x;
  Profile y;
};

/// One-sided limits on the interface: v_pm = principal part -+ (1/2)(1, f') omega / (1 + f'^2).
struct InterfaceTraces {
  VectorProfile v_plus;
  VectorProfile v_minus;
  VectorProfile principal_part;
  double quadrature_error = 0.0;
};

inline InterfaceTraces interface_traces(const Profile& f, const VorticityDensity& omega, const QuadratureRule& rule) {
  f.require_same_grid(omega.profile);
  const GridSpec& g = f.grid();
  std::vector<const Profile*> inputs{&f, &omega.profile};
  const double c = 1.0 / (2.0 * std::numbers::pi);
  auto out = integrate<2>(rule, inputs, [&](const NodeContext& ctx, std::size_t i) {
    const double d = ctx.delta(0, i);
    const double w = ctx.there[1][i];
    return std::array<double, 2>{-c * d * w * ctx.kernel(2, {d * d}), c * w * ctx.kernel(1, {d * d})};
  });
  InterfaceTraces tr;
  tr.principal_part = {Profile(g, std::move(out.values[0])), Profile(g, std::move(out.values[1]))};
  tr.quadrature_error = out.error_estimate;
  const Profile fp = spectral_derivative(f, 1);
  Profile jx(g), jy(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = 0.5 * omega.profile[i] / (1.0 + fp[i] * fp[i]);
    jx[i] = s;
    jy[i] = s * fp[i];
  }
  tr.v_plus = {tr.principal_part.x - jx, tr.principal_part.y - jy};
  tr.v_minus = {tr.principal_part.x + jx, tr.principal_part.y + jy};
  return tr;
}

struct KinematicReport {
  /// max |rhs_kinematic - rhs_evolution| / max |rhs_evolution|, worst side
  double residual = 0.0;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  /// max |<v_+ - v_-, (-f', 1)>| relative to max |rhs_evolution|
  double two_sided_gap = 0.0;
  Profile rhs_evolution;
  Profile rhs_kinematic;
};

/// Compare f_t = <v_pm, (-f', 1)> from the reconstructed velocity with the
/// evolution right-hand side, both in physical time.
inline KinematicReport kinematic_consistency(const Profile& f, const PhysParams& params, const QuadratureRule& rule) {
  const GridSpec& g = f.grid();
  const auto omega = vorticity_density(f, params);
  const auto tr = interface_traces(f, omega, rule);
  const Profile fp = spectral_derivative(f, 1);
  KinematicReport rep;
  rep.rhs_evolution = params.time_scale() * evolution_rhs(f, params, rule).value;
  Profile kin_plus(g), kin_minus(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    kin_plus[i] = -fp[i] * tr.v_plus.x[i] + tr.v_plus.y[i];
    kin_minus[i] = -fp[i] * tr.v_minus.x[i] + tr.v_minus.y[i];
  }
  const double scale = max_abs(rep.rhs_evolution);
  if (scale == 0.0) {
    rep.rhs_kinematic = kin_plus;
    return rep;
  }
  rep.residual_plus = max_abs(kin_plus - rep.rhs_evolution) / scale;
  rep.residual_minus = max_abs(kin_minus - rep.rhs_evolution) / scale;
  rep.residual = std::max(rep.residual_plus, rep.residual_minus);
  rep.two_sided_gap = max_abs(kin_plus - kin_minus) / scale;
  rep.rhs_kinematic = std::move(kin_plus);
  return rep;
}

inline double kinematic_consistency_residual(const Profile& f, const PhysParams& params, const QuadratureRule& rule) {
  return kinematic_consistency(f, params, rule).residual;
}

/// Velocity on a tensor grid; rows are y, columns x. Values inside the
/// 2 dx interface band are NaN and marked NearInterface.
struct VelocityField2D {
  std::vector<double> x_nodes;
  std::vector<double> y_nodes;
  std::vector<std::vector<double>> vx;
  std::vector<std::vector<double>> vy;
  std::vector<std::vector<Side>> mask;
};

inline VelocityField2D sample_velocity(const BiotSavart& bs, std::vector<double> x_nodes, std::vector<double> y_nodes) {
  VelocityField2D v;
  v.x_nodes = std::move(x_nodes);
  v.y_nodes = std::move(y_nodes);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double y : v.y_nodes) {
    std::vector<double> rx, ry;
    std::vector<Side> rm;
    for (double x : v.x_nodes) {
      const Side s = bs.classify({x, y});
      rm.push_back(s);
      if (s == Side::NearInterface) {
        rx.push_back(nan);
        ry.push_back(nan);
      } else {
        const auto u = bs.unchecked({x, y});
        rx.push_back(u.vx);
        ry.push_back(u.vy);
      }
    }
    v.vx.push_back(std::move(rx));
    v.vy.push_back(std::move(ry));
    v.mask.push_back(std::move(rm));
  }
  return v;
}

/// Pressure from Darcy's law by path integration:
///   p_pm(x, y) = c_pm - (mu/k) int_0^x vx(s, pm d) ds - (mu/k) int_{pm d}^y vy(x, s) ds - rho_pm g y,
/// with c_- = 0 and c_+ fixed by p_+ - p_- = sigma kappa(f) at the interface point above x = 0.
class PressureField {
 public:
  PressureField(const Profile& f, const PhysParams& params, double d, int refine = 4)
      : params_(params),
        omega_(vorticity_density(f, params)),
        bs_(f, omega_, refine),
        d_(d),
        kappa0_(interpolate(to_spectrum(curvature(f)), 0.0)) {
    if (!(d > max_abs(f))) throw InvalidInput("pressure reconstruction needs d > max |f|");
    const double margin = 2.0 * f.grid().dx();
    if (d < max_abs(f) + margin) throw InvalidInput("the lines y = +-d must stay 2 dx away from the interface");
    c_plus_ = 0.0;
    const double jump = interface_value(Side::Plus) - interface_value(Side::Minus);
    c_plus_ = params_.sigma * kappa0_ - jump;
  }

  [[nodiscard]] const BiotSavart& biot_savart() const { return bs_; }
  [[nodiscard]] double c_plus() const { return c_plus_; }
  [[nodiscard]] double c_minus() const { return 0.0; }

  /// Horizontal leg first, then vertical.
  [[nodiscard]] double at(Point p) const {
    const Side side = side_of(p);
    const double y0 = side == Side::Plus ? d_ : -d_;
    const double hx = line_integral({0.0, y0}, {p.x, y0});
    const double vy = line_integral({p.x, y0}, {p.x, p.y});
    return finish(side, p.y, hx + vy);
  }

  /// Vertical leg first, then horizontal; agrees with at() for a curl-free field.
  [[nodiscard]] double at_alternate(Point p) const {
    const Side side = side_of(p);
    const double y0 = side == Side::Plus ? d_ : -d_;
    const double vy = line_integral({0.0, y0}, {0.0, p.y});
    const double hx = line_integral({0.0, p.y}, {p.x, p.y});
    return finish(side, p.y, hx + vy);
  }

  /// Pressure on every non-band node of a sampled velocity grid.
  [[nodiscard]] std::vector<std::vector<double>> on_grid(const VelocityField2D& v) const {
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < v.y_nodes.size(); ++r) {
      std::vector<double> row;
      for (std::size_t c = 0; c < v.x_nodes.size(); ++c) {
        if (v.mask[r][c] == Side::NearInterface) {
          row.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        const Point p{v.x_nodes[c], v.y_nodes[r]};
        // points between the interface and -+d must be reached from their own side
        row.push_back(at(p));
      }
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  [[nodiscard]] Side side_of(Point p) const {
    const Side s = bs_.classify(p);
    if (s == Side::NearInterface) throw NearInterface("pressure requested inside the interface band");
    return s;
  }

  [[nodiscard]] double finish(Side side, double y, double integral) const {
    const double rho = side == Side::Plus ? params_.rho_plus : params_.rho_minus;
    const double c = side == Side::Plus ? c_plus_ : 0.0;
    return c - (params_.mu / params_.k_perm) * integral - rho * params_.g * y;
  }

  /// int v . dl along a straight segment, composite Gauss-Legendre with panels <= dx.
  [[nodiscard]] double line_integral(Point a, Point b) const {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(len / bs_.grid().dx())));
    const double tx = (b.x - a.x) / len, ty = (b.y - a.y) / len;
    auto integrand = [&](double s) {
      const auto v = bs_.at({a.x + s * tx, a.y + s * ty});
      return v.vx * tx + v.vy * ty;
    };
    double acc = 0.0;
    const double h = len / panels;
    for (int k = 0; k < panels; ++k)
      acc += boost::math::quadrature::gauss<double, 10>::integrate(integrand, k * h, (k + 1) * h);
    return acc;
  }

  /// Pressure at (0, f(0)) seen from one side, without c_pm: the vertical leg
  /// stops 2.5 dx short of the interface and the last gap uses the trapezoid
  /// rule with the one-sided trace.
  [[nodiscard]] double interface_value(Side side) const {
    const double y_int = bs_.interface_height(0.0);
    const double gap = 2.5 * bs_.grid().dx();
    const double sgn = side == Side::Plus ? 1.0 : -1.0;
    const double y0 = sgn * d_;
    const double y_stop = y_int + sgn * gap;
    double integral = line_integral({0.0, y0}, {0.0, y_stop});
    const double v_stop = bs_.at({0.0, y_stop}).vy;
    const double v_trace = trace_vy(side);
    integral += 0.5 * (v_stop + v_trace) * (y_int - y_stop);
    const double rho = side == Side::Plus ? params_.rho_plus : params_.rho_minus;
    return -(params_.mu / params_.k_perm) * integral - rho * params_.g * y_int;
  }

  [[nodiscard]] double trace_vy(Side side) const {
    // extrapolate along x = 0 from three off-band points (quadratic in the offset)
    const double y_int = bs_.interface_height(0.0);
    const double h = 2.5 * bs_.grid().dx();
    const double sgn = side == Side::Plus ? 1.0 : -1.0;
    const double v1 = bs_.at({0.0, y_int + sgn * h}).vy;
    const double v2 = bs_.at({0.0, y_int + sgn * 2.0 * h}).vy;
    const double v3 = bs_.at({0.0, y_int + sgn * 3.0 * h}).vy;
    return 3.0 * v1 - 3.0 * v2 + v3;
  }

  PhysParams params_;
  VorticityDensity omega_;
  BiotSavart bs_;
  double d_;
  double kappa0_;
  double c_plus_ = 0.0;
};

/// Pressure on the nodes of a sampled velocity grid (NaN in the interface band).
inline std::vector<std::vector<double>> pressure_field(const Profile& f, const VelocityField2D& velocity,
                                                       const PhysParams& params, double d) {
  const PressureField p(f, params, d);
  return p.on_grid(velocity);
}

}  // namespace muskat

#endif  // MUSKAT_FIELDS_HPP
