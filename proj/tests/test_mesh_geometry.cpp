#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hofem/errors.hpp"
#include "hofem/mesh_geometry.hpp"
#include "hofem/quadrature.hpp"

using namespace hofem;

namespace {

ElementCorners reference_cube() {
  ElementCorners c{};
  for (int v = 0; v < 8; ++v)
    c[v] = {v & 1 ? 1.0 : -1.0, v & 2 ? 1.0 : -1.0, v & 4 ? 1.0 : -1.0};
  return c;
}

double det3(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

TEST_CASE("build_cube_mesh sizes") {
  CHECK(build_cube_mesh(8, 2.0).n_el() == 512);
  CHECK(build_cube_mesh(16, 2.0).n_el() == 4096);
  CHECK_THROWS_AS(build_cube_mesh(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_cube_mesh(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_cube_mesh(2, 2.0, 0.3), std::invalid_argument);
}

TEST_CASE("single element is the reference cube") {
  const auto mesh = build_cube_mesh(1, 2.0);
  const auto ref = reference_cube();
  for (int v = 0; v < 8; ++v)
    for (int d = 0; d < 3; ++d) CHECK(mesh.elements[0][v][d] == doctest::Approx(ref[v][d]));
  const auto j = trilinear_jacobian(mesh.elements[0], 0.3, -0.2, 0.7);
  CHECK(j.det == doctest::Approx(1.0));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(j.a[r][c] == doctest::Approx(r == c ? 1.0 : 0.0));
}

TEST_CASE("scaled element has diagonal Jacobian") {
  const double h = 0.25;
  auto el = reference_cube();
  for (auto& v : el)
    for (auto& x : v) x *= h / 2;
  const auto j = trilinear_jacobian(el, -0.5, 0.1, 0.9);
  CHECK(j.det == doctest::Approx(std::pow(h / 2, 3)).epsilon(1e-14));
  CHECK(j.a[0][0] == doctest::Approx(h / 2));
  CHECK(j.a[0][1] == 0.0);
}

TEST_CASE("degenerate element is rejected") {
  auto el = reference_cube();
  for (auto& v : el) v[2] = 0.0;  // flattened
  CHECK_THROWS_AS(trilinear_jacobian(el, 0.0, 0.0, 0.0), DegenerateGeometry);
}

TEST_CASE("Jacobian matches finite differences on perturbed elements") {
  const auto mesh = build_cube_mesh(3, 2.0, 0.2, 11);
  const double h = 1e-6;
  for (const auto& el : mesh.elements) {
    for (const auto& p : {Vec3{0.1, -0.4, 0.6}, Vec3{-0.9, 0.9, 0.0}}) {
      Mat3 fd{};
      for (int c = 0; c < 3; ++c) {
        Vec3 lo = p, hi = p;
        lo[c] -= h;
        hi[c] += h;
        const auto xl = trilinear_map(el, lo[0], lo[1], lo[2]);
        const auto xh = trilinear_map(el, hi[0], hi[1], hi[2]);
        for (int r = 0; r < 3; ++r) fd[r][c] = (xh[r] - xl[r]) / (2 * h);
      }
      const auto j = trilinear_jacobian(el, p[0], p[1], p[2]);
      CHECK(std::abs(j.det - det3(fd)) <= 1e-7);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(std::abs(j.a[r][c] - fd[r][c]) <= 1e-8);
    }
  }
}

TEST_CASE("perturbed mesh keeps the boundary and is reproducible") {
  const auto a = build_cube_mesh(4, 2.0, 0.2, 5);
  const auto b = build_cube_mesh(4, 2.0, 0.2, 5);
  const auto c = build_cube_mesh(4, 2.0, 0.2, 6);
  bool differs = false;
  for (std::size_t e = 0; e < a.n_el(); ++e)
    for (int v = 0; v < 8; ++v)
      for (int d = 0; d < 3; ++d) {
        CHECK(a.elements[e][v][d] == b.elements[e][v][d]);
        differs |= a.elements[e][v][d] != c.elements[e][v][d];
        const double x = a.elements[e][v][d];
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
      }
  CHECK(differs);
}

TEST_CASE("inverse") {
  const Mat3 a{{{2.0, 1.0, 0.0}, {0.5, 3.0, 0.2}, {0.1, 0.0, 1.5}}};
  const auto inv = inverse(a, det3(a));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[r][k] * inv[k][c];
      CHECK(s == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-14));
    }
}

TEST_CASE("identity element factors equal the tensor weights") {
  const auto mesh = build_cube_mesh(1, 2.0);
  const auto rule = gll_rule(2);
  const auto f = geometric_factors(mesh, rule);
  REQUIRE(f.points_per_element() == 8);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t a = 0; a < 2; ++a) {
        const std::size_t p = (c * 2 + b) * 2 + a;
        const double w = rule.weights[a] * rule.weights[b] * rule.weights[c];
        CHECK(f.factor(0, Factor::Grr)[p] == doctest::Approx(w));
        CHECK(f.factor(0, Factor::Gss)[p] == doctest::Approx(w));
        CHECK(f.factor(0, Factor::Gtt)[p] == doctest::Approx(w));
        CHECK(f.factor(0, Factor::GwJ)[p] == doctest::Approx(w));
        CHECK(f.factor(0, Factor::Grs)[p] == 0.0);
        CHECK(f.factor(0, Factor::Grt)[p] == 0.0);
        CHECK(f.factor(0, Factor::Gst)[p] == 0.0);
      }
}

TEST_CASE("weighted determinants sum to the mesh volume") {
  for (int k : {1, 3, 4}) {
    const auto mesh = build_cube_mesh(k, 2.0, k > 1 ? 0.2 : 0.0, 3);
    for (const auto& rule : {gl_rule(4), gll_rule(4)}) {
      const auto f = geometric_factors(mesh, rule);
      double vol = 0.0;
      for (std::size_t e = 0; e < f.n_el(); ++e)
        for (double v : f.factor(e, Factor::GwJ)) vol += v;
      CHECK(vol == doctest::Approx(8.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("metric factors are symmetric positive definite") {
  const auto mesh = build_cube_mesh(2, 2.0, 0.2, 9);
  const auto f = geometric_factors(mesh, gl_rule(3));
  for (std::size_t e = 0; e < f.n_el(); ++e)
    for (std::size_t p = 0; p < f.points_per_element(); ++p) {
      const double grr = f.factor(e, Factor::Grr)[p], grs = f.factor(e, Factor::Grs)[p],
                   grt = f.factor(e, Factor::Grt)[p], gss = f.factor(e, Factor::Gss)[p],
                   gst = f.factor(e, Factor::Gst)[p], gtt = f.factor(e, Factor::Gtt)[p];
      CHECK(grr > 0.0);
      CHECK(grr * gss - grs * grs > 0.0);
      const Mat3 g{{{grr, grs, grt}, {grs, gss, gst}, {grt, gst, gtt}}};
      CHECK(det3(g) > 0.0);
    }
}
