#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hofem/quadrature.hpp"

namespace hofem {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Physical corners of a hexahedron in lexicographic (r, s, t) order:
/// corner index = ir + 2 is + 4 it, with i = 0 at -1 and i = 1 at +1.
using ElementCorners = std::array<Vec3, 8>;

/// Structured hexahedral mesh of the cube [-extent/2, extent/2]^3.
struct HexMesh {
  int elements_per_side = 0;
  double extent = 0.0;
  std::vector<ElementCorners> elements;

  std::size_t n_el() const { return elements.size(); }
};

/// Regular grid of elements_per_side^3 hexahedra. With perturbation > 0 every
/// interior grid vertex is displaced by a uniform random offset of at most
/// perturbation * h per coordinate (h = element size), reproducibly from
/// `seed`; boundary vertices stay on the cube faces so the tiling is preserved.
HexMesh build_cube_mesh(int elements_per_side, double extent, double perturbation = 0.0,
                        std::uint64_t seed = 0);

/// Position of reference point (r, s, t) under the trilinear element map.
Vec3 trilinear_map(const ElementCorners& element, double r, double s, double t);

struct Jacobian {
  Mat3 a{};  // a[row][col] = d x_row / d r_col
  double det = 0.0;
};

/// Forward-map Jacobian d(x, y, z) / d(r, s, t). Throws DegenerateGeometry if
/// |det| <= 1e-14.
Jacobian trilinear_jacobian(const ElementCorners& element, double r, double s, double t);

/// Inverse of a 3x3 matrix with known determinant.
Mat3 inverse(const Mat3& a, double det);

enum class PointSet { GLL, GL };

/// Index of each stored factor within an element block.
enum class Factor : std::size_t { Grr = 0, Grs, Grt, Gss, Gst, Gtt, GwJ };
inline constexpr std::size_t kFactorCount = 7;

/// Per-point weighted metric entries and weighted Jacobian determinants.
///
/// Layout: element-major, then factor, then quadrature point (a, b, c) with a
/// (the r direction) fastest. That is
///   data[(e * 7 + f) * points_per_element + (c * n + b) * n + a].
class GeometricFactors {
 public:
  GeometricFactors() = default;
  GeometricFactors(PointSet set, std::size_t n_el, std::size_t points_1d);

  PointSet point_set() const { return set_; }
  std::size_t n_el() const { return n_el_; }
  std::size_t points_1d() const { return points_1d_; }
  std::size_t points_per_element() const { return points_1d_ * points_1d_ * points_1d_; }

  std::span<const double> factor(std::size_t e, Factor f) const {
    return {data_.data() + (e * kFactorCount + static_cast<std::size_t>(f)) * points_per_element(),
            points_per_element()};
  }
  std::span<double> element_block(std::size_t e) {
    return {data_.data() + e * kFactorCount * points_per_element(),
            kFactorCount * points_per_element()};
  }
  std::span<const double> element_block(std::size_t e) const {
    return {data_.data() + e * kFactorCount * points_per_element(),
            kFactorCount * points_per_element()};
  }
  std::span<const double> data() const { return data_; }

 private:
  PointSet set_ = PointSet::GL;
  std::size_t n_el_ = 0;
  std::size_t points_1d_ = 0;
  std::vector<double> data_;
};

/// Fill one element block (7 * n^3 values) for the tensor-product rule.
void element_factors(const ElementCorners& element, const QuadratureRule& rule,
                     std::span<double> block);

/// Factors at the tensor-product points of `rule` for every element.
/// G = det(A) A^{-1} A^{-T}, GwJ = det(A), each scaled by w_a w_b w_c.
GeometricFactors geometric_factors(const HexMesh& mesh, const QuadratureRule& rule);

}  // namespace hofem
