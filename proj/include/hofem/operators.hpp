#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hofem/mesh_geometry.hpp"
#include "hofem/reference_ops.hpp"

namespace hofem {

/// CEED benchmark operators.
///   BP1_0: mass matrix with GL (N+2)-point quadrature.
///   BP3_5: screened Poisson operator with collocated GLL quadrature.
///   BP3_0: screened Poisson operator with GL (N+2)-point quadrature.
enum class Benchmark { BP1_0, BP3_5, BP3_0 };

/// Storage strategy for intermediates.
///   Baseline: every intermediate tensor lives in a global buffer and each
///             contraction streams a slice at a time with a barrier per slice.
///   Fused:    intermediates live in element scratch, one barrier per stage.
///   SymFused: Fused plus reading only the unique half of the centro-symmetric
///             interpolation matrix (BP1_0 and BP3_0 only).
enum class Variant { Baseline, Fused, SymFused };

std::string_view to_string(Benchmark bp);
std::string_view to_string(Variant v);
std::optional<Benchmark> parse_benchmark(std::string_view s);  // "1.0", "3.5", "3.0"
std::optional<Variant> parse_variant(std::string_view s);      // "baseline", ...

inline constexpr Benchmark kAllBenchmarks[] = {Benchmark::BP1_0, Benchmark::BP3_5,
                                               Benchmark::BP3_0};
inline constexpr Variant kAllVariants[] = {Variant::Baseline, Variant::Fused, Variant::SymFused};

/// True unless the combination is declared unsupported (SymFused on BP3_5).
bool variant_supported(Benchmark bp, Variant v);

/// Data-movement and arithmetic tallies of an operator application.
///
/// Global and scratch traffic are in bytes (8 per double). interp_read_bytes
/// is the part of scratch_read_bytes spent loading entries of the 1D
/// interpolation matrix. syncs counts points where a complete intermediate
/// (or slice of one) must be finished before the next contraction reads it.
struct AccessCounters {
  std::uint64_t global_read_bytes = 0;
  std::uint64_t global_write_bytes = 0;
  std::uint64_t scratch_read_bytes = 0;
  std::uint64_t scratch_write_bytes = 0;
  std::uint64_t interp_read_bytes = 0;
  std::uint64_t flops = 0;
  std::uint64_t syncs = 0;

  std::uint64_t global_bytes() const { return global_read_bytes + global_write_bytes; }
  std::uint64_t scratch_bytes() const { return scratch_read_bytes + scratch_write_bytes; }

  AccessCounters& operator+=(const AccessCounters& o);
  bool operator==(const AccessCounters&) const = default;
};

/// Element-blocked coefficient vector; within an element the layout is
/// lexicographic (k, j, i) with i fastest.
class FieldVector {
 public:
  FieldVector() = default;
  FieldVector(std::size_t n_el, std::size_t n_p, double fill = 0.0)
      : n_el_(n_el), n_p_(n_p), data_(n_el * n_p, fill) {}

  std::size_t n_el() const { return n_el_; }
  std::size_t n_p() const { return n_p_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> element(std::size_t e) { return {data_.data() + e * n_p_, n_p_}; }
  std::span<const double> element(std::size_t e) const { return {data_.data() + e * n_p_, n_p_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

 private:
  std::size_t n_el_ = 0;
  std::size_t n_p_ = 0;
  std::vector<double> data_;
};

double dot(const FieldVector& a, const FieldVector& b);

/// A benchmark operator bound to a mesh: reference matrices, precomputed
/// geometric factors and the screening parameter lambda.
class OperatorInstance {
 public:
  /// Builds the factors on the point set the benchmark needs (GLL for BP3_5,
  /// GL otherwise). Throws UnsupportedVariant, std::invalid_argument.
  OperatorInstance(Benchmark bp, int degree, const HexMesh& mesh, double lambda = 0.0,
                   Variant variant = Variant::Fused);

  /// Reuses existing factors; their point set and size must match the benchmark.
  OperatorInstance(Benchmark bp, int degree, std::shared_ptr<const GeometricFactors> factors,
                   double lambda = 0.0, Variant variant = Variant::Fused);

  OperatorInstance with_variant(Variant v) const;
  OperatorInstance with_lambda(double lambda) const;

  Benchmark bp() const { return bp_; }
  int degree() const { return degree_; }
  double lambda() const { return lambda_; }
  Variant variant() const { return variant_; }
  std::size_t n_el() const { return factors_->n_el(); }

  std::size_t gll_1d() const { return static_cast<std::size_t>(gll_points(degree_)); }
  std::size_t gl_1d() const { return static_cast<std::size_t>(gl_points(degree_)); }
  /// Coefficients per element, (N+1)^3.
  std::size_t points_per_element() const { return gll_1d() * gll_1d() * gll_1d(); }

  const OperatorMatrix& interp() const { return interp_; }
  const OperatorMatrix& interp_t() const { return interp_t_; }
  const OperatorMatrix& diff() const { return diff_; }
  const OperatorMatrix& diff_t() const { return diff_t_; }
  const GeometricFactors& factors() const { return *factors_; }

 private:
  void validate() const;

  Benchmark bp_;
  int degree_;
  double lambda_;
  Variant variant_;
  OperatorMatrix interp_, interp_t_;  // empty for BP3_5
  OperatorMatrix diff_, diff_t_;      // D^{1D} for BP3_5, D~^{1D} for BP3_0, empty for BP1_0
  std::shared_ptr<const GeometricFactors> factors_;
};

/// Element-wise matrix-free application y = A q. Elements are split into
/// `threads` contiguous ranges; per-thread counters are summed into
/// `counters`. Throws ShapeError, NonFiniteInput.
FieldVector apply(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                  int threads = 1);

// Entry points that additionally check the benchmark tag.
FieldVector apply_bp1(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                      int threads = 1);
FieldVector apply_bp35(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                       int threads = 1);
FieldVector apply_bp3(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                      int threads = 1);

/// GLL -> GL interpolation of one element: three contractions along j, i, k.
Tensor3 interpolate_to_gl(const Tensor3& q, const OperatorMatrix& interp);
/// GL -> GLL projection with the transposed interpolation matrix, same order.
Tensor3 project_to_gll(const Tensor3& q, const OperatorMatrix& interp);

/// Counters of one element application on the reference cube. The counts do
/// not depend on geometry or field values.
AccessCounters element_counts(Benchmark bp, Variant v, int degree);

}  // namespace hofem
