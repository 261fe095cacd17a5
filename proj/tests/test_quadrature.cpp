#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hofem/quadrature.hpp"

using namespace hofem;

namespace {

// Exact integral of x^p over [-1, 1].
double monomial_integral(int p) { return p % 2 == 1 ? 0.0 : 2.0 / (p + 1); }

double quadrature_error(const QuadratureRule& rule, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], p);
  return std::abs(s - monomial_integral(p));
}

void check_rule_invariants(const QuadratureRule& rule, int exact_degree) {
  const std::size_t n = rule.size();
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(rule.nodes[i] >= -1.0);
    CHECK(rule.nodes[i] <= 1.0);
    if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    CHECK(rule.weights[i] > 0.0);
    CHECK(std::abs(rule.nodes[i] + rule.nodes[n - 1 - i]) <= 1e-14);
    CHECK(std::abs(rule.weights[i] - rule.weights[n - 1 - i]) <= 1e-14);
    wsum += rule.weights[i];
  }
  CHECK(std::abs(wsum - 2.0) <= 1e-13);
  for (int p = 0; p <= exact_degree; ++p) CHECK(quadrature_error(rule, p) <= 1e-12);
}

}  // namespace

TEST_CASE("gl_rule small cases") {
  const auto r1 = gl_rule(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  const auto r2 = gl_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-0.5773502691896258).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(0.5773502691896258).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(quadrature_error(gl_rule(3), 4) <= 1e-13);
  CHECK(gl_rule(3).kind == RuleKind::GL);
}

TEST_CASE("gll_rule small cases") {
  const auto r2 = gll_rule(2);
  CHECK(r2.nodes[0] == -1.0);
  CHECK(r2.nodes[1] == 1.0);
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto r3 = gll_rule(3);
  CHECK(r3.nodes[1] == 0.0);
  CHECK(r3.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(r3.weights[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto r4 = gll_rule(4);
  CHECK(std::abs(r4.weights[0] + r4.weights[1] + r4.weights[2] + r4.weights[3] - 2.0) <= 1e-13);
}

TEST_CASE("invalid point counts") {
  CHECK_THROWS_AS(gl_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(gll_rule(1), std::invalid_argument);
}

TEST_CASE("rule invariants and exactness for n = 2..20") {
  for (int n = 2; n <= 20; ++n) {
    CAPTURE(n);
    const auto gl = gl_rule(n);
    check_rule_invariants(gl, 2 * n - 1);
    CHECK(gl.nodes.front() > -1.0);
    CHECK(gl.nodes.back() < 1.0);

    const auto gll = gll_rule(n);
    check_rule_invariants(gll, 2 * n - 3);
    CHECK(gll.nodes.front() == -1.0);
    CHECK(gll.nodes.back() == 1.0);
  }
}

TEST_CASE("GL nodes are roots of P_n to 1e-14") {
  for (int n = 1; n <= 20; ++n)
    for (double x : gl_rule(n).nodes) CHECK(std::abs(legendre_and_derivative(n, x).value) <= 1e-14);
}

TEST_CASE("legendre_and_derivative") {
  auto v = legendre_and_derivative(2, 0.0);
  CHECK(v.value == doctest::Approx(-0.5));
  CHECK(v.derivative == 0.0);
  v = legendre_and_derivative(1, 0.3);
  CHECK(v.value == doctest::Approx(0.3));
  CHECK(v.derivative == doctest::Approx(1.0));
  v = legendre_and_derivative(5, 1.0);
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.derivative == doctest::Approx(15.0).epsilon(1e-14));

  // derivative against a central difference
  const double h = 1e-6;
  for (int n = 1; n <= 12; ++n) {
    const double x = 0.37;
    const double fd = (legendre_and_derivative(n, x + h).value -
                       legendre_and_derivative(n, x - h).value) / (2 * h);
    CHECK(legendre_and_derivative(n, x).derivative == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(legendre_and_derivative(3, 1.1), std::invalid_argument);
}

TEST_CASE("Lagrange cardinality and partition of unity") {
  const auto nodes = gll_rule(6).nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      CHECK(lagrange_eval(nodes, i, nodes[j]) == (i == j ? 1.0 : 0.0));

  for (double x : {-0.93, -0.2, 0.0, 0.41, 0.999}) {
    double s = 0.0;
    double ds = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s += lagrange_eval(nodes, i, x);
      ds += lagrange_deriv(nodes, i, x);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(ds) <= 1e-11);
  }
}

TEST_CASE("Lagrange derivative matches finite differences for N <= 15") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  const double h = 1e-6;
  for (int degree = 1; degree <= 15; ++degree) {
    const auto nodes = gll_rule(degree + 1).nodes;
    for (int trial = 0; trial < 10; ++trial) {
      const double x = u(rng);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double fd =
            (lagrange_eval(nodes, i, x + h) - lagrange_eval(nodes, i, x - h)) / (2 * h);
        const double d = lagrange_deriv(nodes, i, x);
        CAPTURE(degree);
        CAPTURE(x);
        CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
      }
    }
  }
}

TEST_CASE("Lagrange duplicate nodes are rejected") {
  const std::vector<double> nodes{-1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(lagrange_eval(nodes, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_deriv(nodes, 1, 0.5), std::invalid_argument);
}
