#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hofem {

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 15;

/// Number of GLL interpolation nodes per direction, N + 1.
constexpr int gll_points(int degree) { return degree + 1; }
/// Number of GL quadrature nodes per direction used for full quadrature, N + 2.
constexpr int gl_points(int degree) { return degree + 2; }

/// Throws std::invalid_argument unless kMinDegree <= degree <= kMaxDegree.
void check_degree(int degree);

enum class OperatorKind { Interp, DiffGLL, DiffGL };

/// Dense row-major 1D operator matrix.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(OperatorKind kind, std::size_t rows, std::size_t cols);

  OperatorKind kind() const { return kind_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  std::span<const double> entries() const { return entries_; }

  OperatorMatrix transposed() const;

 private:
  OperatorKind kind_ = OperatorKind::Interp;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// I^{1D}: (N+2) x (N+1), entry (a, i) = l_i(GL node a).
OperatorMatrix interp_matrix(int degree);
/// D^{1D}: (N+1) x (N+1), entry (a, i) = l_i'(GLL node a).
OperatorMatrix diff_matrix_gll(int degree);
/// D~^{1D}: (N+2) x (N+2), derivatives of the GL-node Lagrange basis at GL nodes.
OperatorMatrix diff_matrix_gl(int degree);

/// Differentiation matrix for the Lagrange basis on arbitrary distinct nodes.
/// Diagonal is set to minus the off-diagonal row sum.
OperatorMatrix differentiation_matrix(std::span<const double> nodes, OperatorKind kind);

/// max |A(a,i) - A(rows-1-a, cols-1-i)|
double centro_symmetry_defect(const OperatorMatrix& m);

/// Extents of a 3D tensor. Axis 0 (r / i) is the fastest index, axis 2 (t / k)
/// the slowest: flat index = (k * n[1] + j) * n[0] + i.
struct Extents3 {
  std::array<std::size_t, 3> n{0, 0, 0};

  std::size_t size() const { return n[0] * n[1] * n[2]; }
  std::size_t operator[](int axis) const { return n[static_cast<std::size_t>(axis)]; }
  std::size_t stride(int axis) const { return axis == 0 ? 1 : axis == 1 ? n[0] : n[0] * n[1]; }
  bool operator==(const Extents3&) const = default;

  static Extents3 cube(std::size_t m) { return {{m, m, m}}; }
};

class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Extents3 ext, double fill = 0.0) : ext_(ext), data_(ext.size(), fill) {}
  Tensor3(Extents3 ext, std::vector<double> data);

  const Extents3& extents() const { return ext_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t k, std::size_t j, std::size_t i) const {
    return data_[(k * ext_.n[1] + j) * ext_.n[0] + i];
  }
  double& operator()(std::size_t k, std::size_t j, std::size_t i) {
    return data_[(k * ext_.n[1] + j) * ext_.n[0] + i];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::vector<double>& values() { return data_; }

 private:
  Extents3 ext_;
  std::vector<double> data_;
};

/// out[..a..] = sum_b op(a, b) in[..b..] along `axis`; the other two axes are
/// untouched. Throws ShapeError if the extent along `axis` differs from op.cols().
Tensor3 contract_dim(const OperatorMatrix& op, const Tensor3& in, int axis);

}  // namespace hofem
