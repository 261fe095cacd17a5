#include "hofem/dense_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hofem/errors.hpp"
#include "hofem/quadrature.hpp"
#include "hofem/reference_ops.hpp"

namespace hofem {

std::vector<double> DenseElementMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n) throw ShapeError("DenseElementMatrix::multiply: size mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += (*this)(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

double DenseElementMatrix::asymmetry() const {
  double d = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < r; ++c) d = std::max(d, std::abs((*this)(r, c) - (*this)(c, r)));
  return d;
}

bool cholesky_succeeds(const DenseElementMatrix& m) {
  const std::size_t n = m.n;
  std::vector<double> l(n * n, 0.0);
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(j, j)));
  // pivots at roundoff level mean a numerically singular matrix
  const double tol = 1e-12 * scale;
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > tol)) return false;
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return true;
}

namespace {

void check_oracle_degree(int degree) {
  check_degree(degree);
  if (degree > kOracleMaxDegree)
    throw std::invalid_argument("dense oracle supports degrees up to " +
                                std::to_string(kOracleMaxDegree));
}

// 1D GLL Lagrange basis values and derivatives at the points of `rule`:
// table[q * nb + i] = l_i(x_q) (resp. l_i'(x_q)).
struct BasisTable {
  std::size_t nq = 0;  // quadrature points per direction
  std::size_t nb = 0;  // basis functions per direction
  std::vector<double> val, der;
};

BasisTable tabulate(const std::vector<double>& basis_nodes, const QuadratureRule& rule) {
  BasisTable t;
  t.nq = rule.size();
  t.nb = basis_nodes.size();
  t.val.resize(t.nq * t.nb);
  t.der.resize(t.nq * t.nb);
  for (std::size_t q = 0; q < t.nq; ++q)
    for (std::size_t i = 0; i < t.nb; ++i) {
      t.val[q * t.nb + i] = lagrange_eval(basis_nodes, i, rule.nodes[q]);
      t.der[q * t.nb + i] = lagrange_deriv(basis_nodes, i, rule.nodes[q]);
    }
  return t;
}

DenseElementMatrix empty_matrix(Benchmark bp, int degree, std::size_t element_id) {
  const auto nb = static_cast<std::size_t>(gll_points(degree));
  DenseElementMatrix m;
  m.bp = bp;
  m.element = element_id;
  m.n = nb * nb * nb;
  m.entries.assign(m.n * m.n, 0.0);
  return m;
}

// Sum over quadrature points of  grad(l_p)^T G grad(l_p') * stiff_scale
// + lambda * w |det| l_p l_p'. Basis values at each point are formed as
// products of the 1D tables; the metric is evaluated from the element map.
DenseElementMatrix quadrature_sum(Benchmark bp, const ElementCorners& element, int degree,
                                  const QuadratureRule& rule, bool with_stiffness, double lambda,
                                  std::size_t element_id) {
  const auto gll = gll_rule(gll_points(degree));
  const BasisTable tab = tabulate(gll.nodes, rule);
  DenseElementMatrix m = empty_matrix(bp, degree, element_id);
  const std::size_t nb = tab.nb;
  const std::size_t n = m.n;

  std::vector<double> phi(n);
  std::vector<std::array<double, 3>> grad(n);
  for (std::size_t c = 0; c < tab.nq; ++c)
    for (std::size_t b = 0; b < tab.nq; ++b)
      for (std::size_t a = 0; a < tab.nq; ++a) {
        const double w = rule.weights[a] * rule.weights[b] * rule.weights[c];
        const auto jac = trilinear_jacobian(element, rule.nodes[a], rule.nodes[b], rule.nodes[c]);
        const Mat3 inv = inverse(jac.a, jac.det);
        const double wdet = w * std::abs(jac.det);
        double g[3][3];
        for (int x = 0; x < 3; ++x)
          for (int y = 0; y < 3; ++y)
            g[x][y] = w * jac.det *
                      (inv[x][0] * inv[y][0] + inv[x][1] * inv[y][1] + inv[x][2] * inv[y][2]);

        for (std::size_t k = 0; k < nb; ++k)
          for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t i = 0; i < nb; ++i) {
              const std::size_t p = (k * nb + j) * nb + i;
              const double vi = tab.val[a * nb + i], vj = tab.val[b * nb + j],
                           vk = tab.val[c * nb + k];
              const double di = tab.der[a * nb + i], dj = tab.der[b * nb + j],
                           dk = tab.der[c * nb + k];
              phi[p] = vi * vj * vk;
              grad[p] = {di * vj * vk, vi * dj * vk, vi * vj * dk};
            }

        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t pp = 0; pp < n; ++pp) {
            double s = lambda * wdet * phi[p] * phi[pp];
            if (with_stiffness)
              for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y) s += grad[p][x] * g[x][y] * grad[pp][y];
            m(p, pp) += s;
          }
      }
  return m;
}

// Dense (n_out^3 x n_in^3) matrix of A (x) A (x) A in (k, j, i) ordering.
std::vector<double> kron3(const OperatorMatrix& a) {
  const std::size_t r = a.rows(), c = a.cols();
  const std::size_t R = r * r * r, C = c * c * c;
  std::vector<double> out(R * C);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t kk = 0; kk < c; ++kk)
          for (std::size_t jj = 0; jj < c; ++jj)
            for (std::size_t ii = 0; ii < c; ++ii)
              out[((k * r + j) * r + i) * C + (kk * c + jj) * c + ii] = a(k, kk) * a(j, jj) * a(i, ii);
  return out;
}

// Dense derivative along `axis` on an n^3 tensor grid: I (x) ... D ... (x) I.
std::vector<double> directional(const OperatorMatrix& d, int axis) {
  const std::size_t n = d.rows();
  const std::size_t N = n * n * n;
  std::vector<double> out(N * N, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = (k * n + j) * n + i;
        const std::size_t idx[3] = {i, j, k};
        for (std::size_t m = 0; m < n; ++m) {
          std::size_t col_idx[3] = {i, j, k};
          col_idx[axis] = m;
          out[row * N + (col_idx[2] * n + col_idx[1]) * n + col_idx[0]] = d(idx[axis], m);
        }
      }
  return out;
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                           std::size_t rows, std::size_t inner, std::size_t cols) {
  std::vector<double> c(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < inner; ++k) {
      const double v = a[r * inner + k];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) c[r * cols + j] += v * b[k * cols + j];
    }
  return c;
}

DenseElementMatrix composed_full_quadrature(const ElementCorners& element, int degree,
                                            double lambda, std::size_t element_id) {
  const auto rule = gl_rule(gl_points(degree));
  const std::size_t ng = rule.size();
  const std::size_t npg = ng * ng * ng;
  std::vector<double> factors(kFactorCount * npg);
  element_factors(element, rule, factors);
  auto fac = [&](Factor f, std::size_t p) { return factors[static_cast<std::size_t>(f) * npg + p]; };

  DenseElementMatrix m = empty_matrix(Benchmark::BP3_0, degree, element_id);
  const std::size_t np = m.n;
  const auto interp = kron3(interp_matrix(degree));  // npg x np
  const auto dgl = diff_matrix_gl(degree);
  std::array<std::vector<double>, 3> y;  // D~_x I, npg x np
  for (int x = 0; x < 3; ++x) y[x] = matmul(directional(dgl, x), interp, npg, npg, np);

  const Factor g[3][3] = {{Factor::Grr, Factor::Grs, Factor::Grt},
                          {Factor::Grs, Factor::Gss, Factor::Gst},
                          {Factor::Grt, Factor::Gst, Factor::Gtt}};
  for (std::size_t q = 0; q < npg; ++q)
    for (std::size_t r = 0; r < np; ++r)
      for (std::size_t c = 0; c < np; ++c) {
        double s = lambda * fac(Factor::GwJ, q) * interp[q * np + r] * interp[q * np + c];
        for (int x = 0; x < 3; ++x)
          for (int z = 0; z < 3; ++z) s += y[x][q * np + r] * fac(g[x][z], q) * y[z][q * np + c];
        m(r, c) += s;
      }
  return m;
}

}  // namespace

DenseElementMatrix assemble_mass(const ElementCorners& element, int degree,
                                 std::size_t element_id) {
  check_oracle_degree(degree);
  return quadrature_sum(Benchmark::BP1_0, element, degree, gl_rule(gl_points(degree)), false, 1.0,
                        element_id);
}

DenseElementMatrix assemble_stiffness_collocation(const ElementCorners& element, int degree,
                                                  double lambda, std::size_t element_id) {
  check_oracle_degree(degree);
  return quadrature_sum(Benchmark::BP3_5, element, degree, gll_rule(gll_points(degree)), true,
                        lambda, element_id);
}

DenseElementMatrix assemble_stiffness_full_quadrature(const ElementCorners& element, int degree,
                                                      double lambda, AssemblyRoute route,
                                                      std::size_t element_id) {
  check_oracle_degree(degree);
  if (route == AssemblyRoute::ComposedOperators)
    return composed_full_quadrature(element, degree, lambda, element_id);
  return quadrature_sum(Benchmark::BP3_0, element, degree, gl_rule(gl_points(degree)), true, lambda,
                        element_id);
}

DenseElementMatrix assemble_for(Benchmark bp, const ElementCorners& element, int degree,
                                double lambda, std::size_t element_id) {
  switch (bp) {
    case Benchmark::BP1_0: return assemble_mass(element, degree, element_id);
    case Benchmark::BP3_5:
      return assemble_stiffness_collocation(element, degree, lambda, element_id);
    case Benchmark::BP3_0:
      return assemble_stiffness_full_quadrature(element, degree, lambda,
                                                AssemblyRoute::DirectQuadrature, element_id);
  }
  throw std::invalid_argument("unknown benchmark");
}

}  // namespace hofem
