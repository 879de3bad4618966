#ifndef MUSKAT_GRID_HPP
#define MUSKAT_GRID_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/fft.hpp"

namespace muskat {

using cplx = std::complex<double>;

/// Uniform periodic truncation [-L, L) of the real line with N nodes.
struct GridSpec {
  double half_width = std::numbers::pi;
  int n_points = 64;

  GridSpec() = default;
  GridSpec(double L, int N) : half_width(L), n_points(N) { validate(); }

  void validate() const {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw InvalidInput("grid half width must be positive and finite");
    if (n_points < 16 || n_points % 2 != 0)
      throw InvalidInput("grid size must be an even integer >= 16, got " + std::to_string(n_points));
  }

  [[nodiscard]] double length() const { return 2.0 * half_width; }
  [[nodiscard]] double dx() const { return 2.0 * half_width / n_points; }
  [[nodiscard]] double node(int i) const { return -half_width + i * dx(); }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_points); }
  [[nodiscard]] int nyquist() const { return n_points / 2; }
  /// Physical frequency of integer wavenumber k.
  [[nodiscard]] double xi(int k) const { return std::numbers::pi * k / half_width; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real samples f(x_i) of an interface profile.
class Profile {
 public:
  Profile() = default;
  explicit Profile(GridSpec grid) : grid_(grid), values_(grid.size(), 0.0) {}
  Profile(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidInput("profile has " + std::to_string(values_.size()) + " samples, grid expects " +
                         std::to_string(grid_.size()));
  }

  template <class F>
  static Profile sample(const GridSpec& grid, F&& fn) {
    Profile p(grid);
    for (int i = 0; i < grid.n_points; ++i) p.values_[static_cast<std::size_t>(i)] = fn(grid.node(i));
    return p;
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  [[nodiscard]] bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  Profile& operator+=(const Profile& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Profile& operator-=(const Profile& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Profile& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend Profile operator+(Profile a, const Profile& b) { return a += b; }
  friend Profile operator-(Profile a, const Profile& b) { return a -= b; }
  friend Profile operator*(double s, Profile a) { return a *= s; }
  friend Profile operator*(Profile a, double s) { return a *= s; }

  void require_same_grid(const Profile& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch("profiles live on different grids");
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Fourier coefficients c_k, k = -N/2 .. N/2-1, with f(x_i) = sum_k c_k exp(i xi_k x_i).
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(GridSpec grid) : grid_(grid), coeffs_(grid.size()) {}
  Spectrum(GridSpec grid, std::vector<cplx> coeffs_ascending) : grid_(grid), coeffs_(std::move(coeffs_ascending)) {
    if (coeffs_.size() != grid_.size()) throw InvalidInput("spectrum size does not match grid");
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] int kmin() const { return -grid_.nyquist(); }
  [[nodiscard]] int kmax() const { return grid_.nyquist() - 1; }
  cplx& at(int k) { return coeffs_[index(k)]; }
  [[nodiscard]] const cplx& at(int k) const { return coeffs_[index(k)]; }
  /// Coefficients in ascending wavenumber order.
  [[nodiscard]] std::span<const cplx> coeffs() const { return coeffs_; }
  [[nodiscard]] std::span<cplx> coeffs() { return coeffs_; }

  /// Largest violation of c_{-k} = conj(c_k) (the Nyquist and mean modes must be real).
  [[nodiscard]] double symmetry_defect() const {
    double worst = std::abs(at(0).imag());
    worst = std::max(worst, std::abs(at(kmin()).imag()));
    for (int k = 1; k < grid_.nyquist(); ++k) worst = std::max(worst, std::abs(at(-k) - std::conj(at(k))));
    return worst;
  }

 private:
  [[nodiscard]] std::size_t index(int k) const {
    if (k < kmin() || k > kmax()) throw InvalidInput("wavenumber " + std::to_string(k) + " outside spectrum");
    return static_cast<std::size_t>(k - kmin());
  }

  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

namespace detail {

inline void require_finite(const Profile& f, const char* what) {
  if (!f.all_finite()) throw InvalidInput(std::string(what) + ": profile contains non-finite values");
}

// (-1)^k
inline double sign_alt(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

inline Spectrum to_spectrum(const Profile& f) {
  detail::require_finite(f, "to_spectrum");
  const auto& g = f.grid();
  const int n = g.n_points;
  auto half = fft::r2c(f.values());
  Spectrum s(g);
  // x_i = -L + i dx, so exp(-i xi_k x_i) = (-1)^k exp(-2 pi i k i / N).
  for (int k = 0; k < n / 2; ++k) {
    cplx c = half[static_cast<std::size_t>(k)] * (detail::sign_alt(k) / n);
    s.at(k) = c;
    if (k > 0) s.at(-k) = std::conj(c);
  }
  s.at(-n / 2) = half[static_cast<std::size_t>(n / 2)] * (detail::sign_alt(n / 2) / n);
  return s;
}

inline Profile to_profile(const Spectrum& s) {
  const auto& g = s.grid();
  const int n = g.n_points;
  double scale = 0.0;
  for (const auto& c : s.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvalidInput("to_profile: non-finite coefficient");
    scale = std::max(scale, std::abs(c));
  }
  if (s.symmetry_defect() > 1e-10 * std::max(1.0, scale))
    throw SymmetryViolation("to_profile: spectrum is not conjugate symmetric (defect " +
                            std::to_string(s.symmetry_defect()) + ")");
  std::vector<cplx> half(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k < n / 2; ++k) half[static_cast<std::size_t>(k)] = s.at(k) * detail::sign_alt(k);
  half[static_cast<std::size_t>(n / 2)] = cplx(s.at(-n / 2).real() * detail::sign_alt(n / 2), 0.0);
  return Profile(g, fft::c2r(half, g.size()));
}

/// Apply the Fourier multiplier m(xi) to a real profile. The Nyquist mode is
/// scaled by Re m(xi_{N/2}), the even part of the symbol, so the output stays real.
template <class Symbol>
Profile apply_multiplier(const Profile& f, Symbol&& m) {
  const auto& g = f.grid();
  const int n = g.n_points;
  auto half = fft::r2c(f.values());
  for (int k = 0; k < n / 2; ++k) half[static_cast<std::size_t>(k)] *= cplx(m(g.xi(k)));
  half[static_cast<std::size_t>(n / 2)] *= cplx(m(g.xi(n / 2))).real();
  auto out = fft::c2r(half, g.size());
  for (auto& v : out) v /= n;
  return Profile(g, std::move(out));
}

inline Profile spectral_derivative(const Profile& f, int order) {
  if (order < 0 || order > 4) throw InvalidInput("spectral_derivative: order must be in [0, 4]");
  detail::require_finite(f, "spectral_derivative");
  if (order == 0) return f;
  return apply_multiplier(f, [order](double xi) {
    cplx ik(0.0, xi);
    cplx r = 1.0;
    for (int j = 0; j < order; ++j) r *= ik;
    return r;
  });
}

/// g(x_i) = f(x_i - y) by trigonometric interpolation; exact index rotation
/// when y is an integer multiple of dx.
inline Profile shift(const Profile& f, double y) {
  const auto& g = f.grid();
  const double m = y / g.dx();
  const double mr = std::round(m);
  if (std::abs(m - mr) < 1e-12 * std::max(1.0, std::abs(m))) {
    const int n = g.n_points;
    long long s = static_cast<long long>(mr) % n;
    if (s < 0) s += n;
    Profile out(g);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>((i - s + n) % n)];
    return out;
  }
  return apply_multiplier(f, [y](double xi) { return std::exp(cplx(0.0, -xi * y)); });
}

/// Trigonometric interpolant of f at an arbitrary point x.
inline double interpolate(const Spectrum& s, double x) {
  const auto& g = s.grid();
  cplx acc = 0.0;
  for (int k = s.kmin(); k <= s.kmax(); ++k) acc += s.at(k) * std::exp(cplx(0.0, g.xi(k) * x));
  return acc.real();
}

/// delta_{[x_i, y]} f = f(x_i) - f(x_i - y).
inline double delta_kernel(const Profile& f, int x_index, double y) {
  const auto& g = f.grid();
  const int n = g.n_points;
  const int i = ((x_index % n) + n) % n;
  const double m = y / g.dx();
  const double mr = std::round(m);
  if (std::abs(m - mr) < 1e-12 * std::max(1.0, std::abs(m))) {
    long long s = static_cast<long long>(mr) % n;
    const auto j = static_cast<std::size_t>(((i - s) % n + n) % n);
    return f[static_cast<std::size_t>(i)] - f[j];
  }
  return f[static_cast<std::size_t>(i)] - interpolate(to_spectrum(f), g.node(i) - y);
}

enum class NormKind { L2, Linf, SobolevHs, Wiener, HolderSemi };

struct NormSpec {
  NormKind kind = NormKind::L2;
  double param = 0.0;

  static NormSpec l2() { return {NormKind::L2, 0.0}; }
  static NormSpec linf() { return {NormKind::Linf, 0.0}; }
  static NormSpec sobolev(double s) {
    if (!(s >= -1.0)) throw InvalidInput("Sobolev index must be >= -1");
    return {NormKind::SobolevHs, s};
  }
  static NormSpec wiener() { return {NormKind::Wiener, 0.0}; }
  static NormSpec holder(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("Hoelder exponent must lie in (0, 1)");
    return {NormKind::HolderSemi, theta};
  }
};

/// Discrete norms. Wiener: sum_k |xi_k| |c_k| (Fourier-series coefficients,
/// no 2L factor). Hoelder seminorm: grid pairs at periodic distance <= L/2.
inline double norm(const Profile& f, const NormSpec& spec) {
  const auto& g = f.grid();
  const auto v = f.values();
  switch (spec.kind) {
    case NormKind::L2: {
      double acc = 0.0;
      for (double x : v) acc += x * x;
      return std::sqrt(acc * g.dx());
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      return m;
    }
    case NormKind::SobolevHs: {
      const auto s = to_spectrum(f);
      double acc = 0.0;
      for (int k = s.kmin(); k <= s.kmax(); ++k) {
        const double xi = g.xi(k);
        acc += std::pow(1.0 + xi * xi, spec.param) * std::norm(s.at(k));
      }
      return std::sqrt(acc * g.length());
    }
    case NormKind::Wiener: {
      const auto s = to_spectrum(f);
      double acc = 0.0;
      for (int k = s.kmin(); k <= s.kmax(); ++k) acc += std::abs(g.xi(k)) * std::abs(s.at(k));
      return acc;
    }
    case NormKind::HolderSemi: {
      const int n = g.n_points;
      const int max_sep = std::max(1, static_cast<int>(std::floor(0.5 * g.half_width / g.dx())));
      double worst = 0.0;
      for (int m = 1; m <= max_sep; ++m) {
        const double denom = std::pow(m * g.dx(), spec.param);
        for (int i = 0; i < n; ++i) {
          const double d = std::abs(v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>((i + m) % n)]);
          worst = std::max(worst, d / denom);
        }
      }
      return worst;
    }
  }
  return 0.0;
}

inline double mean(const Profile& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / static_cast<double>(f.size());
}

inline double max_abs(const Profile& f) { return norm(f, NormSpec::linf()); }

/// Evaluate a pointwise nonlinearity of several profiles on a 2x-padded grid
/// and project back, so quadratic aliasing does not fold into retained modes.
/// The padded grid contains the coarse nodes, which keeps the result exactly
/// equivariant under on-grid shifts.
template <class Fn>
Profile pointwise_dealiased(std::span<const Profile> inputs, Fn&& fn) {
  if (inputs.empty()) throw InvalidInput("pointwise_dealiased: no inputs");
  const GridSpec g = inputs.front().grid();
  for (const auto& p : inputs) inputs.front().require_same_grid(p);
  const int n = g.n_points;
  const int m = 2 * n;
  const GridSpec fine(g.half_width, m);

  std::vector<Profile> padded;
  padded.reserve(inputs.size());
  for (const auto& p : inputs) {
    const auto s = to_spectrum(p);
    Spectrum big(fine);
    for (int k = -n / 2 + 1; k < n / 2; ++k) big.at(k) = s.at(k);
    // split the Nyquist cosine evenly between +-N/2
    big.at(-n / 2) = 0.5 * s.at(-n / 2).real();
    big.at(n / 2) = 0.5 * s.at(-n / 2).real();
    padded.push_back(to_profile(big));
  }

  Profile fine_out(fine);
  std::vector<double> args(inputs.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    for (std::size_t j = 0; j < inputs.size(); ++j) args[j] = padded[j][i];
    fine_out[i] = fn(std::span<const double>(args));
  }

  const auto big = to_spectrum(fine_out);
  Spectrum s(g);
  for (int k = -n / 2 + 1; k < n / 2; ++k) s.at(k) = big.at(k);
  s.at(-n / 2) = (big.at(-n / 2) + big.at(n / 2)).real();
  return to_profile(s);
}

}  // namespace muskat

#endif  // MUSKAT_GRID_HPP
