#include "hofem/reference_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hofem/errors.hpp"
#include "hofem/quadrature.hpp"

namespace hofem {

void check_degree(int degree) {
  if (degree < kMinDegree || degree > kMaxDegree)
    throw std::invalid_argument("polynomial degree must be in [" + std::to_string(kMinDegree) +
                                ", " + std::to_string(kMaxDegree) + "], got " +
                                std::to_string(degree));
}

OperatorMatrix::OperatorMatrix(OperatorKind kind, std::size_t rows, std::size_t cols)
    : kind_(kind), rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

OperatorMatrix OperatorMatrix::transposed() const {
  OperatorMatrix t(kind_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

OperatorMatrix interp_matrix(int degree) {
  check_degree(degree);
  const auto gll = gll_rule(gll_points(degree));
  const auto gl = gl_rule(gl_points(degree));
  OperatorMatrix m(OperatorKind::Interp, gl.size(), gll.size());
  for (std::size_t a = 0; a < gl.size(); ++a)
    for (std::size_t i = 0; i < gll.size(); ++i) m(a, i) = lagrange_eval(gll.nodes, i, gl.nodes[a]);
  return m;
}

OperatorMatrix differentiation_matrix(std::span<const double> nodes, OperatorKind kind) {
  const std::size_t n = nodes.size();
  const auto w = barycentric_weights(nodes);
  OperatorMatrix d(kind, n, n);
  for (std::size_t a = 0; a < n; ++a) {
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == a) continue;
      d(a, i) = (w[i] / w[a]) / (nodes[a] - nodes[i]);
      diag -= d(a, i);
    }
    d(a, a) = diag;
  }
  return d;
}

OperatorMatrix diff_matrix_gll(int degree) {
  check_degree(degree);
  return differentiation_matrix(gll_rule(gll_points(degree)).nodes, OperatorKind::DiffGLL);
}

OperatorMatrix diff_matrix_gl(int degree) {
  check_degree(degree);
  return differentiation_matrix(gl_rule(gl_points(degree)).nodes, OperatorKind::DiffGL);
}

double centro_symmetry_defect(const OperatorMatrix& m) {
  double defect = 0.0;
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t i = 0; i < m.cols(); ++i)
      defect = std::max(defect, std::abs(m(a, i) - m(m.rows() - 1 - a, m.cols() - 1 - i)));
  return defect;
}

Tensor3::Tensor3(Extents3 ext, std::vector<double> data) : ext_(ext), data_(std::move(data)) {
  if (data_.size() != ext_.size()) throw ShapeError("Tensor3: data size does not match extents");
}

Tensor3 contract_dim(const OperatorMatrix& op, const Tensor3& in, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("contract_dim: axis must be 0, 1 or 2");
  const Extents3& ie = in.extents();
  if (ie[axis] != op.cols())
    throw ShapeError("contract_dim: extent " + std::to_string(ie[axis]) + " along axis " +
                     std::to_string(axis) + " does not match operator columns " +
                     std::to_string(op.cols()));
  Extents3 oe = ie;
  oe.n[static_cast<std::size_t>(axis)] = op.rows();
  Tensor3 out(oe);

  const std::size_t in_stride = ie.stride(axis);
  const std::size_t out_stride = oe.stride(axis);
  // Iterate over all fibers: positions with the contracted index set to zero.
  for (std::size_t k = 0; k < (axis == 2 ? 1 : oe[2]); ++k)
    for (std::size_t j = 0; j < (axis == 1 ? 1 : oe[1]); ++j)
      for (std::size_t i = 0; i < (axis == 0 ? 1 : oe[0]); ++i) {
        const std::size_t in_base = (k * ie[1] + j) * ie[0] + i;
        const std::size_t out_base = (k * oe[1] + j) * oe[0] + i;
        for (std::size_t a = 0; a < op.rows(); ++a) {
          double s = 0.0;
          for (std::size_t b = 0; b < op.cols(); ++b) s += op(a, b) * in.data()[in_base + b * in_stride];
          out.data()[out_base + a * out_stride] = s;
        }
      }
  return out;
}

}  // namespace hofem
