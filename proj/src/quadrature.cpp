#include "hofem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hofem {
namespace {

constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxIterations = 100;

struct LegendreSeries {
  double p = 0.0;    // P_n
  double dp = 0.0;   // P_n'
  double d2p = 0.0;  // P_n''
};

// P_{k+1}   = ((2k+1) x P_k - k P_{k-1}) / (k+1)
// P'_{k+1}  = P'_{k-1}  + (2k+1) P_k
// P''_{k+1} = P''_{k-1} + (2k+1) P'_k
// The derivative recurrences avoid the 1/(1-x^2) singularity at the endpoints.
LegendreSeries legendre_series(int n, double x) {
  LegendreSeries prev{1.0, 0.0, 0.0};
  if (n == 0) return prev;
  LegendreSeries cur{x, 1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double twok1 = 2.0 * k + 1.0;
    LegendreSeries next;
    next.p = (twok1 * x * cur.p - k * prev.p) / (k + 1.0);
    next.dp = prev.dp + twok1 * cur.p;
    next.d2p = prev.d2p + twok1 * cur.dp;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <class Residual>
double newton(double x, Residual&& residual_and_slope) {
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const auto [f, df] = residual_and_slope(x);
    const double dx = f / df;
    x -= dx;
    if (std::abs(dx) <= kNewtonTolerance) return x;
  }
  throw std::runtime_error("Newton iteration for quadrature node did not converge");
}

// Enforce exact mirror symmetry: nodes[i] = -nodes[n-1-i], weights[i] = weights[n-1-i].
void symmetrize(QuadratureRule& rule) {
  const std::size_t n = rule.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

}  // namespace

LegendreValue legendre_and_derivative(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_and_derivative: n must be >= 0");
  if (!(std::abs(x) <= 1.0 + 1e-12))
    throw std::invalid_argument("legendre_and_derivative: |x| must not exceed 1");
  const auto s = legendre_series(n, x);
  return {s.p, s.dp};
}

QuadratureRule gl_rule(int n) {
  if (n < 1) throw std::invalid_argument("gl_rule: n must be >= 1, got " + std::to_string(n));
  QuadratureRule rule;
  rule.kind = RuleKind::GL;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-type guess, ascending order.
    const double guess = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    const double x = newton(guess, [n](double y) {
      const auto s = legendre_series(n, y);
      return std::pair{s.p, s.dp};
    });
    const double dp = legendre_series(n, x).dp;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  symmetrize(rule);
  return rule;
}

QuadratureRule gll_rule(int n) {
  if (n < 2) throw std::invalid_argument("gll_rule: n must be >= 2, got " + std::to_string(n));
  const int degree = n - 1;
  QuadratureRule rule;
  rule.kind = RuleKind::GLL;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  // Interior nodes are the roots of P'_{n-1}; Chebyshev-Gauss-Lobatto guesses.
  for (int i = 1; i < degree; ++i) {
    const double guess = -std::cos(std::numbers::pi * i / degree);
    rule.nodes[i] = newton(guess, [degree](double y) {
      const auto s = legendre_series(degree, y);
      return std::pair{s.dp, s.d2p};
    });
  }
  const double scale = 2.0 / (static_cast<double>(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    const double p = legendre_series(degree, rule.nodes[i]).p;
    rule.weights[i] = scale / (p * p);
  }
  symmetrize(rule);
  return rule;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  if (n == 0) throw std::invalid_argument("barycentric_weights: empty node set");
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = nodes[i] - nodes[j];
      if (std::abs(d) <= 1e-14)
        throw std::invalid_argument("Lagrange nodes must be pairwise distinct");
      w[i] /= d;
    }
  }
  return w;
}

double lagrange_eval(std::span<const double> nodes, std::size_t i, double x) {
  if (i >= nodes.size()) throw std::invalid_argument("lagrange_eval: index out of range");
  const auto w = barycentric_weights(nodes);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double d = x - nodes[j];
    if (d == 0.0) return i == j ? 1.0 : 0.0;
    const double t = w[j] / d;
    if (j == i) num = t;
    den += t;
  }
  return num / den;
}

double lagrange_deriv(std::span<const double> nodes, std::size_t i, double x) {
  if (i >= nodes.size()) throw std::invalid_argument("lagrange_deriv: index out of range");
  const auto w = barycentric_weights(nodes);
  const std::size_t n = nodes.size();

  for (std::size_t k = 0; k < n; ++k) {
    if (x != nodes[k]) continue;
    // Exactly at a node: closed-form differentiation-matrix entries.
    if (k != i) return (w[i] / w[k]) / (nodes[k] - nodes[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += 1.0 / (nodes[i] - nodes[j]);
    return s;
  }

  // l_i'(x) = l_i(x) * sum_{j != i} 1 / (x - x_j)
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) s += 1.0 / (x - nodes[j]);
  return lagrange_eval(nodes, i, x) * s;
}

}  // namespace hofem
