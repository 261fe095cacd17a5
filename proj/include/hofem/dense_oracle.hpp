#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hofem/mesh_geometry.hpp"
#include "hofem/operators.hpp"

namespace hofem {

/// Largest degree the dense assembly accepts (N_p = 125).
inline constexpr int kOracleMaxDegree = 4;

/// Dense elemental matrix assembled straight from the quadrature sums,
/// without sum factorization. Rows and columns use the (k, j, i) lexicographic
/// coefficient order of FieldVector.
struct DenseElementMatrix {
  Benchmark bp = Benchmark::BP1_0;
  std::size_t element = 0;
  std::size_t n = 0;
  std::vector<double> entries;  // row-major n x n

  double operator()(std::size_t r, std::size_t c) const { return entries[r * n + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries[r * n + c]; }

  std::vector<double> multiply(std::span<const double> x) const;
  /// max |A - A^T|
  double asymmetry() const;
};

/// Mass matrix with (N+2)-point GL quadrature.
DenseElementMatrix assemble_mass(const ElementCorners& element, int degree,
                                 std::size_t element_id = 0);

/// Stiffness plus lambda times mass, both with collocated (N+1)-point GLL quadrature.
DenseElementMatrix assemble_stiffness_collocation(const ElementCorners& element, int degree,
                                                  double lambda, std::size_t element_id = 0);

enum class AssemblyRoute {
  /// Quadrature sum over GL points with gradients of the GLL basis.
  DirectQuadrature,
  /// Explicit dense product I^T D~^T G D~ I + lambda I^T J I from Kronecker matrices.
  ComposedOperators,
};

/// Stiffness plus lambda times mass with (N+2)-point GL quadrature.
DenseElementMatrix assemble_stiffness_full_quadrature(
    const ElementCorners& element, int degree, double lambda,
    AssemblyRoute route = AssemblyRoute::DirectQuadrature, std::size_t element_id = 0);

/// The oracle matching an operator's benchmark for one element.
DenseElementMatrix assemble_for(Benchmark bp, const ElementCorners& element, int degree,
                                double lambda, std::size_t element_id = 0);

/// Cholesky factorization succeeds with every pivot above 1e-12 times the
/// largest diagonal entry (matrix numerically positive definite).
bool cholesky_succeeds(const DenseElementMatrix& m);

}  // namespace hofem
