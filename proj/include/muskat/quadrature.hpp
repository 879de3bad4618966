#ifndef MUSKAT_QUADRATURE_HPP
#define MUSKAT_QUADRATURE_HPP

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"

namespace muskat {

/// Symmetric midpoint rule for principal-value integrals over one period.
///
/// Integrands of the form C(x, y) y^{-p} prod_i (1 + d_i(x, y)^2 / y^2)^{-1},
/// with C and d_i 2L-periodic in y, are integrated over the whole line by
/// summing the kernel over the images y + 2Ln: images |n| <= image_count
/// explicitly, the rest by the expansion in d_i^2 / Y^2 against precomputed
/// tails sum_{|n| > M} (y + 2Ln)^{-q} (symmetric summation for q = 1).
class QuadratureRule {
 public:
  static constexpr int kMaxOrder = 4;

  /// cells = 0 picks the default: h_y = 2 dx when 8 | N (every node lies on an
  /// odd grid offset), otherwise h_y = dx.
  static QuadratureRule midpoint(const GridSpec& grid, int cells = 0, bool estimate_error = true, int image_count = 1,
                                 int tail_terms = 6) {
    grid.validate();
    if (cells == 0) cells = (grid.n_points % 8 == 0) ? grid.n_points / 4 : grid.n_points / 2;
    if (cells < 2) throw InvalidInput("quadrature needs at least two cells per half period");
    if (image_count < 0 || tail_terms < 1) throw InvalidInput("invalid image/tail truncation");
    QuadratureRule r;
    r.grid_ = grid;
    r.cells_ = cells;
    r.h_y_ = grid.half_width / cells;
    r.image_count_ = image_count;
    r.tail_terms_ = tail_terms;
    r.q_max_ = kMaxOrder + 2 * (tail_terms - 1);
    r.nodes_.reserve(static_cast<std::size_t>(2 * cells));
    for (int j = cells; j >= 1; --j) r.nodes_.push_back(-(j - 0.5) * r.h_y_);
    for (int j = 1; j <= cells; ++j) r.nodes_.push_back((j - 0.5) * r.h_y_);
    r.weights_.assign(r.nodes_.size(), r.h_y_);
    r.build_tails();
    if (estimate_error && cells % 2 == 0)
      r.coarse_ = std::make_shared<const QuadratureRule>(midpoint(grid, cells / 2, false, image_count, tail_terms));
    return r;
  }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] int cells() const { return cells_; }
  [[nodiscard]] double h_y() const { return h_y_; }
  [[nodiscard]] int image_count() const { return image_count_; }
  [[nodiscard]] int tail_terms() const { return tail_terms_; }
  [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] bool estimates_error() const { return coarse_ != nullptr; }
  [[nodiscard]] const QuadratureRule* coarse() const { return coarse_.get(); }

  /// Rule with the node spacing halved (same truncation settings).
  [[nodiscard]] QuadratureRule refined(bool estimate_error = true) const {
    return midpoint(grid_, 2 * cells_, estimate_error, image_count_, tail_terms_);
  }

  /// Image tail sum_{|n| > M} (y_node + 2Ln)^{-q}.
  [[nodiscard]] double tail(std::size_t node, int q) const {
    return tails_[node * static_cast<std::size_t>(q_max_ + 1) + static_cast<std::size_t>(q)];
  }

  /// Periodized kernel sum_n Y^{-p} prod_i (1 + d2_i / Y^2)^{-1}, Y = y_node + 2Ln.
  [[nodiscard]] double kernel(std::size_t node, int p, std::span<const double> d2) const {
    if (p < 1 || p > kMaxOrder) throw InvalidInput("kernel order out of range");
    const double y = nodes_[node];
    const double period = grid_.length();
    double acc = 0.0;
    for (int n = -image_count_; n <= image_count_; ++n) {
      const double Y = y + period * n;
      const double Y2 = Y * Y;
      double v = 1.0;
      for (int k = 0; k < p; ++k) v /= Y;
      for (double d : d2) v /= 1.0 + d / Y2;
      acc += v;
    }
    // complete homogeneous symmetric polynomials h_k(d2)
    std::array<double, 16> h{};
    const auto terms = static_cast<std::size_t>(tail_terms_);
    h[0] = 1.0;
    for (double d : d2)
      for (std::size_t k = 1; k < terms; ++k) h[k] += d * h[k - 1];
    double sign = 1.0;
    for (std::size_t k = 0; k < terms; ++k) {
      acc += sign * h[k] * tail(node, p + 2 * static_cast<int>(k));
      sign = -sign;
    }
    return acc;
  }

 private:
  QuadratureRule() = default;

  void build_tails() {
    if (tail_terms_ > 16) throw InvalidInput("at most 16 tail terms supported");
    const auto stride = static_cast<std::size_t>(q_max_ + 1);
    tails_.assign(nodes_.size() * stride, 0.0);
    const double period = grid_.length();
    const double a = image_count_ + 1.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const double u = nodes_[j] / period;
      tails_[j * stride + 1] = (boost::math::digamma(a - u) - boost::math::digamma(a + u)) / period;
      for (int q = 2; q <= q_max_; ++q) {
        // Hurwitz zeta(q, b) = (-1)^q psi^{(q-1)}(b) / (q-1)!
        const double fact = boost::math::factorial<double>(static_cast<unsigned>(q - 1));
        const double sgn = (q % 2 == 0) ? 1.0 : -1.0;
        const double zp = sgn * boost::math::polygamma(q - 1, a + u) / fact;
        const double zm = sgn * boost::math::polygamma(q - 1, a - u) / fact;
        tails_[j * stride + static_cast<std::size_t>(q)] = std::pow(period, -q) * (zp + sgn * zm);
      }
    }
  }

  GridSpec grid_;
  int cells_ = 0;
  double h_y_ = 0.0;
  int image_count_ = 1;
  int tail_terms_ = 6;
  int q_max_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> tails_;
  std::shared_ptr<const QuadratureRule> coarse_;
};

/// Data visible to an integrand at one quadrature node: each input sampled at
/// x_i (here) and at x_i - y (there).
struct NodeContext {
  const QuadratureRule* rule = nullptr;
  std::size_t node = 0;
  double y = 0.0;
  std::vector<std::span<const double>> here;
  std::vector<std::vector<double>> there;

  [[nodiscard]] double kernel(int p, std::span<const double> d2) const { return rule->kernel(node, p, d2); }
  [[nodiscard]] double kernel(int p, std::initializer_list<double> d2) const {
    return rule->kernel(node, p, std::span<const double>(d2.begin(), d2.size()));
  }
  /// delta_{[x_i, y]} u_k
  [[nodiscard]] double delta(std::size_t k, std::size_t i) const { return here[k][i] - there[k][i]; }
};

template <std::size_t K>
struct QuadratureOutput {
  std::array<std::vector<double>, K> values;
  double error_estimate = 0.0;
};

namespace detail {

inline std::vector<double> shifted_values(const Profile& u, double y) {
  auto s = shift(u, y);
  return {s.values().begin(), s.values().end()};
}

template <std::size_t K, class Fn>
std::array<std::vector<double>, K> integrate_once(const QuadratureRule& rule, std::span<const Profile* const> inputs,
                                                  Fn& fn) {
  const auto n = rule.grid().size();
  std::array<std::vector<double>, K> acc;
  for (auto& a : acc) a.assign(n, 0.0);
  NodeContext ctx;
  ctx.rule = &rule;
  for (const Profile* p : inputs) ctx.here.push_back(p->values());
  ctx.there.resize(inputs.size());
  std::array<std::vector<double>, K> contrib;
  for (auto& c : contrib) c.assign(n, 0.0);
  for (std::size_t j = 0; j < rule.size(); ++j) {
    ctx.node = j;
    ctx.y = rule.nodes()[j];
    for (std::size_t k = 0; k < inputs.size(); ++k) ctx.there[k] = shifted_values(*inputs[k], ctx.y);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const std::array<double, K> v = fn(ctx, i);
      for (std::size_t c = 0; c < K; ++c) {
        contrib[c][i] = v[c];
        finite = finite && std::isfinite(v[c]);
      }
    }
    if (!finite) throw NumericFailure("non-finite kernel value at quadrature node y = " + std::to_string(ctx.y));
    const double w = rule.weights()[j];
    for (std::size_t c = 0; c < K; ++c)
      for (std::size_t i = 0; i < n; ++i) acc[c][i] += w * contrib[c][i];
  }
  return acc;
}

}  // namespace detail

/// Sum over nodes of w_j fn(ctx, i) for every grid index i. fn returns K
/// outputs per (node, x). The error estimate is max |Q(h_y) - Q(2 h_y)| over
/// outputs and x, floored at a few ulps of the result.
template <std::size_t K, class Fn>
QuadratureOutput<K> integrate(const QuadratureRule& rule, std::span<const Profile* const> inputs, Fn&& fn) {
  for (const Profile* p : inputs)
    if (!(p->grid() == rule.grid())) throw GridMismatch("quadrature input lives on a different grid than the rule");
  QuadratureOutput<K> out;
  out.values = detail::integrate_once<K>(rule, inputs, fn);
  double scale = 0.0;
  for (const auto& v : out.values)
    for (double x : v) scale = std::max(scale, std::abs(x));
  double est = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  if (const QuadratureRule* coarse = rule.coarse()) {
    const auto rough = detail::integrate_once<K>(*coarse, inputs, fn);
    for (std::size_t c = 0; c < K; ++c)
      for (std::size_t i = 0; i < rough[c].size(); ++i) est = std::max(est, std::abs(out.values[c][i] - rough[c][i]));
  }
  out.error_estimate = est;
  return out;
}

}  // namespace muskat

#endif  // MUSKAT_QUADRATURE_HPP
