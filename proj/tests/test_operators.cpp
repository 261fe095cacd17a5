#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hofem/dense_oracle.hpp"
#include "hofem/errors.hpp"
#include "hofem/operators.hpp"
#include "hofem/perf_model.hpp"
#include "test_support.hpp"

using namespace hofem;
using hofem::testing::max_abs;
using hofem::testing::random_field;
using hofem::testing::rel_inf_error;

namespace {

FieldVector run(const OperatorInstance& op, const FieldVector& q, int threads = 1) {
  AccessCounters c;
  return apply(op, q, c, threads);
}

double lambda_for(Benchmark bp) { return bp == Benchmark::BP1_0 ? 0.0 : 0.7; }

}  // namespace

TEST_CASE("names round-trip") {
  for (auto bp : kAllBenchmarks) CHECK(parse_benchmark(to_string(bp)) == bp);
  for (auto v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK_FALSE(parse_benchmark("2.0").has_value());
  CHECK_FALSE(parse_variant("fast").has_value());
  CHECK_FALSE(variant_supported(Benchmark::BP3_5, Variant::SymFused));
}

TEST_CASE("construction errors") {
  const auto mesh = build_cube_mesh(1, 2.0);
  CHECK_THROWS_AS(OperatorInstance(Benchmark::BP3_5, 2, mesh, 0.0, Variant::SymFused),
                  UnsupportedVariant);
  CHECK_THROWS_AS(OperatorInstance(Benchmark::BP3_0, 2, mesh, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(OperatorInstance(Benchmark::BP1_0, 0, mesh), std::invalid_argument);

  auto gl = std::make_shared<const GeometricFactors>(geometric_factors(mesh, gl_rule(4)));
  CHECK_THROWS_AS(OperatorInstance(Benchmark::BP3_5, 2, gl), ShapeError);
  CHECK_NOTHROW(OperatorInstance(Benchmark::BP1_0, 2, gl));
}

TEST_CASE("input validation") {
  const auto mesh = build_cube_mesh(1, 2.0);
  const OperatorInstance op(Benchmark::BP1_0, 2, mesh);
  AccessCounters c;
  CHECK_THROWS_AS(apply(op, FieldVector(1, 8), c), ShapeError);
  FieldVector bad(1, 27, 1.0);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(apply(op, bad, c), NonFiniteInput);
  CHECK_THROWS_AS(apply_bp35(op, FieldVector(1, 27), c), std::invalid_argument);
}

TEST_CASE("interpolation and projection") {
  const auto interp = interp_matrix(1);
  // nodal values of x on the GLL grid, i fastest
  Tensor3 x(Extents3::cube(2));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) x(k, j, i) = i == 0 ? -1.0 : 1.0;
  const auto xg = interpolate_to_gl(x, interp);
  const auto gl = gl_rule(3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t a = 0; a < 3; ++a) CHECK(xg(c, b, a) == doctest::Approx(gl.nodes[a]).epsilon(1e-15));

  const auto c3 = interpolate_to_gl(Tensor3(Extents3::cube(3), 2.5), interp_matrix(2));
  for (double v : c3.data()) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

  const auto z = project_to_gll(Tensor3(Extents3::cube(4)), interp_matrix(2));
  CHECK(max_abs(z.data()) == 0.0);

  // projection against the dense Kronecker transpose
  const auto i2 = interp_matrix(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor3 v(Extents3::cube(4));
  for (auto& e : v.data()) e = u(rng);
  const auto p = project_to_gll(v, i2);
  double worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < 4; ++c)
          for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t a = 0; a < 4; ++a) s += i2(c, k) * i2(b, j) * i2(a, i) * v(c, b, a);
        worst = std::max(worst, std::abs(s - p(k, j, i)));
      }
  CHECK(worst <= 1e-13);
}

TEST_CASE("mass action sums to volume") {
  const auto ref = build_cube_mesh(1, 2.0);
  const OperatorInstance m1(Benchmark::BP1_0, 1, ref);
  CHECK(testing::sum(run(m1, FieldVector(1, 8, 1.0)).data()) == doctest::Approx(8.0).epsilon(1e-12));

  const auto mesh = build_cube_mesh(8, 2.0);
  for (int n : {1, 3}) {
    const OperatorInstance op(Benchmark::BP1_0, n, mesh);
    const FieldVector ones(mesh.n_el(), op.points_per_element(), 1.0);
    CHECK(std::abs(testing::sum(run(op, ones).data()) - 8.0) <= 1e-10);
  }

  for (auto bp : {Benchmark::BP3_5, Benchmark::BP3_0}) {
    const OperatorInstance op(bp, 3, ref, 1.0);
    CHECK(std::abs(testing::sum(run(op, FieldVector(1, 64, 1.0)).data()) - 8.0) <= 1e-11);
  }
}

TEST_CASE("stiffness annihilates constants") {
  const auto mesh = build_cube_mesh(2, 2.0, 0.2, 4);
  for (auto bp : {Benchmark::BP3_5, Benchmark::BP3_0})
    for (auto v : {Variant::Baseline, Variant::Fused, Variant::SymFused}) {
      if (!variant_supported(bp, v)) continue;
      for (int n = 1; n <= 6; ++n) {
        const OperatorInstance op(bp, n, mesh, 0.0, v);
        const FieldVector ones(mesh.n_el(), op.points_per_element(), 1.0);
        CHECK(max_abs(run(op, ones).data()) <= 1e-10);
      }
    }
}

TEST_CASE("matrix-free matches dense element matrices") {
  const auto mesh = build_cube_mesh(2, 2.0, 0.2, 21);
  for (auto bp : kAllBenchmarks)
    for (int n = 1; n <= 3; ++n) {
      const double lambda = lambda_for(bp);
      const OperatorInstance op(bp, n, mesh, lambda);
      const auto q = random_field(mesh.n_el(), op.points_per_element(), 100 + n);
      const auto y = run(op, q);
      for (std::size_t e = 0; e < mesh.n_el(); ++e) {
        const auto dense = assemble_for(bp, mesh.elements[e], n, lambda, e);
        const auto ref = dense.multiply(q.element(e));
        CAPTURE(to_string(bp));
        CAPTURE(n);
        CHECK(rel_inf_error(y.element(e), ref) <= (bp == Benchmark::BP1_0 ? 1e-12 : 1e-11));
      }
    }
}

TEST_CASE("symmetry, semidefiniteness and variant agreement") {
  const auto mesh = build_cube_mesh(2, 2.0, 0.15, 8);
  for (auto bp : kAllBenchmarks)
    for (int n = 1; n <= 5; ++n) {
      const OperatorInstance base(bp, n, mesh, lambda_for(bp), Variant::Fused);
      const auto np = base.points_per_element();
      for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_field(mesh.n_el(), np, 1000 + trial);
        const auto v = random_field(mesh.n_el(), np, 2000 + trial);
        const auto au = run(base, u);
        const auto av = run(base, v);
        const double lhs = dot(au, v), rhs = dot(u, av);
        CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(lhs)));
        CHECK(dot(au, u) >= -1e-10);

        for (auto var : kAllVariants) {
          if (!variant_supported(bp, var) || var == Variant::Fused) continue;
          CHECK(rel_inf_error(run(base.with_variant(var), u).data(), au.data()) <= 1e-12);
        }
      }
    }
}

TEST_CASE("element permutation permutes outputs") {
  auto mesh = build_cube_mesh(2, 2.0, 0.2, 13);
  const OperatorInstance op(Benchmark::BP3_0, 3, mesh, 0.5);
  const auto np = op.points_per_element();
  const auto q = random_field(mesh.n_el(), np, 5);
  const auto y = run(op, q);

  std::vector<std::size_t> perm(mesh.n_el());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[4]);
  HexMesh pm = mesh;
  FieldVector pq(mesh.n_el(), np);
  for (std::size_t e = 0; e < perm.size(); ++e) {
    pm.elements[e] = mesh.elements[perm[e]];
    std::copy_n(q.element(perm[e]).begin(), np, pq.element(e).begin());
  }
  const auto py = run(OperatorInstance(Benchmark::BP3_0, 3, pm, 0.5), pq);
  for (std::size_t e = 0; e < perm.size(); ++e) {
    const auto a = py.element(e);
    const auto b = y.element(perm[e]);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("threaded application matches serial") {
  const auto mesh = build_cube_mesh(3, 2.0, 0.1, 2);
  for (auto bp : kAllBenchmarks) {
    const OperatorInstance op(bp, 3, mesh, lambda_for(bp));
    const auto q = random_field(mesh.n_el(), op.points_per_element(), 77);
    AccessCounters c1, c8;
    const auto y1 = apply(op, q, c1, 1);
    const auto y8 = apply(op, q, c8, 8);
    CHECK(c1 == c8);
    CHECK(std::equal(y1.data().begin(), y1.data().end(), y8.data().begin()));
  }
  AccessCounters c;
  const OperatorInstance op(Benchmark::BP1_0, 1, build_cube_mesh(1, 2.0));
  CHECK_NOTHROW(apply(op, FieldVector(1, 8, 1.0), c, 16));  // more threads than elements
}

TEST_CASE("counters match the closed-form models") {
  for (auto bp : kAllBenchmarks)
    for (auto v : kAllVariants) {
      if (!variant_supported(bp, v)) continue;
      for (int n = 1; n <= 8; ++n) {
        CAPTURE(to_string(bp));
        CAPTURE(to_string(v));
        CAPTURE(n);
        const auto c = element_counts(bp, v, n);
        CHECK(c.flops == flop_model(bp, v, n));
        CHECK(c.syncs == sync_model(bp, v, n));
        const auto t = traffic(bp, n, 1);
        if (v == Variant::Baseline)
          CHECK(c.global_bytes() > t.bytes_per_element());
        else
          CHECK(c.global_bytes() == t.bytes_per_element());
      }
    }
  CHECK(element_counts(Benchmark::BP1_0, Variant::Fused, 1).flops == 483);
  CHECK(element_counts(Benchmark::BP1_0, Variant::Baseline, 12).syncs == 71);
  CHECK(element_counts(Benchmark::BP1_0, Variant::Fused, 12).syncs == 5);
}

TEST_CASE("mesh counters scale with the element count") {
  const auto mesh = build_cube_mesh(2, 2.0, 0.1, 1);
  const OperatorInstance op(Benchmark::BP3_5, 2, mesh, 0.3, Variant::Baseline);
  AccessCounters c;
  apply(op, FieldVector(mesh.n_el(), 27, 1.0), c);
  const auto e = element_counts(Benchmark::BP3_5, Variant::Baseline, 2);
  CHECK(c.flops == 8 * e.flops);
  CHECK(c.global_read_bytes == 8 * e.global_read_bytes);
  CHECK(c.scratch_bytes() == 8 * e.scratch_bytes());
}

TEST_CASE("symmetric variant halves interpolation loads") {
  for (auto bp : {Benchmark::BP1_0, Benchmark::BP3_0})
    for (int n = 1; n <= 15; ++n) {
      const auto f = element_counts(bp, Variant::Fused, n);
      const auto s = element_counts(bp, Variant::SymFused, n);
      CHECK(f.interp_read_bytes > 0);
      CHECK(2 * s.interp_read_bytes <= f.interp_read_bytes);
      CHECK(s.flops == f.flops);
    }
}
