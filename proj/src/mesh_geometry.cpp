#include "hofem/mesh_geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hofem/errors.hpp"

namespace hofem {

HexMesh build_cube_mesh(int elements_per_side, double extent, double perturbation,
                        std::uint64_t seed) {
  if (elements_per_side < 1) throw std::invalid_argument("elements_per_side must be >= 1");
  if (!(extent > 0.0)) throw std::invalid_argument("mesh extent must be positive");
  if (!(perturbation >= 0.0 && perturbation < 0.25))
    throw std::invalid_argument("perturbation must lie in [0, 0.25)");

  const int m = elements_per_side;
  const int nv = m + 1;
  const double h = extent / m;
  const double origin = -0.5 * extent;

  std::vector<Vec3> grid(static_cast<std::size_t>(nv) * nv * nv);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-perturbation * h, perturbation * h);
  for (int k = 0; k < nv; ++k)
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nv; ++i) {
        Vec3 x{origin + i * h, origin + j * h, origin + k * h};
        const int idx[3] = {i, j, k};
        if (perturbation > 0.0)
          for (int d = 0; d < 3; ++d) {
            const double offset = jitter(rng);  // drawn for every vertex to keep streams aligned
            if (idx[d] > 0 && idx[d] < m) x[d] += offset;
          }
        grid[(static_cast<std::size_t>(k) * nv + j) * nv + i] = x;
      }

  HexMesh mesh;
  mesh.elements_per_side = m;
  mesh.extent = extent;
  mesh.elements.reserve(static_cast<std::size_t>(m) * m * m);
  for (int ek = 0; ek < m; ++ek)
    for (int ej = 0; ej < m; ++ej)
      for (int ei = 0; ei < m; ++ei) {
        ElementCorners c;
        for (int corner = 0; corner < 8; ++corner) {
          const int i = ei + (corner & 1);
          const int j = ej + ((corner >> 1) & 1);
          const int k = ek + ((corner >> 2) & 1);
          c[corner] = grid[(static_cast<std::size_t>(k) * nv + j) * nv + i];
        }
        mesh.elements.push_back(c);
      }
  return mesh;
}

Vec3 trilinear_map(const ElementCorners& element, double r, double s, double t) {
  Vec3 x{0.0, 0.0, 0.0};
  for (int corner = 0; corner < 8; ++corner) {
    const double fr = (corner & 1) ? 0.5 * (1 + r) : 0.5 * (1 - r);
    const double fs = (corner & 2) ? 0.5 * (1 + s) : 0.5 * (1 - s);
    const double ft = (corner & 4) ? 0.5 * (1 + t) : 0.5 * (1 - t);
    for (int d = 0; d < 3; ++d) x[d] += fr * fs * ft * element[corner][d];
  }
  return x;
}

Jacobian trilinear_jacobian(const ElementCorners& element, double r, double s, double t) {
  Jacobian jac;
  for (int corner = 0; corner < 8; ++corner) {
    const double sr = (corner & 1) ? 1.0 : -1.0;
    const double ss = (corner & 2) ? 1.0 : -1.0;
    const double st = (corner & 4) ? 1.0 : -1.0;
    const double fr = 0.5 * (1 + sr * r);
    const double fs = 0.5 * (1 + ss * s);
    const double ft = 0.5 * (1 + st * t);
    const double dphi[3] = {0.5 * sr * fs * ft, 0.5 * ss * fr * ft, 0.5 * st * fr * fs};
    for (int d = 0; d < 3; ++d)
      for (int c = 0; c < 3; ++c) jac.a[d][c] += element[corner][d] * dphi[c];
  }
  const Mat3& a = jac.a;
  jac.det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
            a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
            a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(jac.det) > 1e-14)) throw DegenerateGeometry("degenerate hexahedral element");
  return jac;
}

Mat3 inverse(const Mat3& a, double det) {
  Mat3 inv;
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return inv;
}

GeometricFactors::GeometricFactors(PointSet set, std::size_t n_el, std::size_t points_1d)
    : set_(set), n_el_(n_el), points_1d_(points_1d),
      data_(n_el * kFactorCount * points_1d * points_1d * points_1d, 0.0) {}

void element_factors(const ElementCorners& element, const QuadratureRule& rule,
                     std::span<double> block) {
  const std::size_t n = rule.size();
  const std::size_t np = n * n * n;
  if (block.size() != kFactorCount * np) throw ShapeError("element_factors: block size mismatch");

  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t p = (c * n + b) * n + a;
        const double w = rule.weights[a] * rule.weights[b] * rule.weights[c];
        const auto jac = trilinear_jacobian(element, rule.nodes[a], rule.nodes[b], rule.nodes[c]);
        const Mat3 inv = inverse(jac.a, jac.det);
        // G = det * A^{-1} A^{-T}: G(x, y) = det * sum_d inv[x][d] inv[y][d]
        auto g = [&](int x, int y) {
          return jac.det * (inv[x][0] * inv[y][0] + inv[x][1] * inv[y][1] + inv[x][2] * inv[y][2]);
        };
        const double entries[kFactorCount] = {g(0, 0), g(0, 1), g(0, 2), g(1, 1),
                                              g(1, 2), g(2, 2), jac.det};
        for (std::size_t f = 0; f < kFactorCount; ++f) block[f * np + p] = w * entries[f];
      }
}

GeometricFactors geometric_factors(const HexMesh& mesh, const QuadratureRule& rule) {
  GeometricFactors factors(rule.kind == RuleKind::GLL ? PointSet::GLL : PointSet::GL, mesh.n_el(),
                           rule.size());
  for (std::size_t e = 0; e < mesh.n_el(); ++e)
    element_factors(mesh.elements[e], rule, factors.element_block(e));
  return factors;
}

}  // namespace hofem
