#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hofem {

enum class RuleKind { GL, GLL };

/// One-dimensional quadrature rule on [-1, 1], nodes ascending.
struct QuadratureRule {
  RuleKind kind = RuleKind::GL;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule (interior nodes, exact to degree 2n-1).
/// Throws std::invalid_argument for n < 1.
QuadratureRule gl_rule(int n);

/// n-point Gauss-Lobatto-Legendre rule (includes both endpoints, exact to
/// degree 2n-3). Throws std::invalid_argument for n < 2.
QuadratureRule gll_rule(int n);

struct LegendreValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// P_n(x) and P_n'(x) by the three-term recurrence; |x| <= 1 + 1e-12.
LegendreValue legendre_and_derivative(int n, double x);

// Lagrange cardinal polynomials on an arbitrary set of distinct nodes,
// evaluated in barycentric form. Duplicate nodes throw std::invalid_argument.
double lagrange_eval(std::span<const double> nodes, std::size_t i, double x);
double lagrange_deriv(std::span<const double> nodes, std::size_t i, double x);

/// Barycentric weights 1 / prod_{j != i} (x_i - x_j).
std::vector<double> barycentric_weights(std::span<const double> nodes);

}  // namespace hofem
