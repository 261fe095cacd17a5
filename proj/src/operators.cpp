#include "hofem/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "hofem/errors.hpp"
#include "hofem/quadrature.hpp"

namespace hofem {

std::string_view to_string(Benchmark bp) {
  switch (bp) {
    case Benchmark::BP1_0: return "1.0";
    case Benchmark::BP3_5: return "3.5";
    case Benchmark::BP3_0: return "3.0";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Fused: return "fused";
    case Variant::SymFused: return "symfused";
  }
  return "?";
}

std::optional<Benchmark> parse_benchmark(std::string_view s) {
  if (s == "1.0" || s == "1" || s == "bp1" || s == "BP1.0") return Benchmark::BP1_0;
  if (s == "3.5" || s == "bp3.5" || s == "BP3.5") return Benchmark::BP3_5;
  if (s == "3.0" || s == "3" || s == "bp3" || s == "BP3.0") return Benchmark::BP3_0;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "baseline") return Variant::Baseline;
  if (s == "fused") return Variant::Fused;
  if (s == "symfused") return Variant::SymFused;
  return std::nullopt;
}

bool variant_supported(Benchmark bp, Variant v) {
  return !(v == Variant::SymFused && bp == Benchmark::BP3_5);
}

AccessCounters& AccessCounters::operator+=(const AccessCounters& o) {
  global_read_bytes += o.global_read_bytes;
  global_write_bytes += o.global_write_bytes;
  scratch_read_bytes += o.scratch_read_bytes;
  scratch_write_bytes += o.scratch_write_bytes;
  interp_read_bytes += o.interp_read_bytes;
  flops += o.flops;
  syncs += o.syncs;
  return *this;
}

double dot(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw ShapeError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// OperatorInstance

namespace {

QuadratureRule rule_for(Benchmark bp, int degree) {
  return bp == Benchmark::BP3_5 ? gll_rule(gll_points(degree)) : gl_rule(gl_points(degree));
}

}  // namespace

OperatorInstance::OperatorInstance(Benchmark bp, int degree, const HexMesh& mesh, double lambda,
                                   Variant variant)
    : OperatorInstance(bp, degree,
                       [&] {
                         check_degree(degree);
                         return std::make_shared<const GeometricFactors>(
                             geometric_factors(mesh, rule_for(bp, degree)));
                       }(),
                       lambda, variant) {}

OperatorInstance::OperatorInstance(Benchmark bp, int degree,
                                   std::shared_ptr<const GeometricFactors> factors, double lambda,
                                   Variant variant)
    : bp_(bp), degree_(degree), lambda_(lambda), variant_(variant), factors_(std::move(factors)) {
  check_degree(degree);
  validate();
  if (bp_ != Benchmark::BP3_5) {
    interp_ = interp_matrix(degree_);
    interp_t_ = interp_.transposed();
  }
  if (bp_ == Benchmark::BP3_5) diff_ = diff_matrix_gll(degree_);
  if (bp_ == Benchmark::BP3_0) diff_ = diff_matrix_gl(degree_);
  if (bp_ != Benchmark::BP1_0) diff_t_ = diff_.transposed();
}

void OperatorInstance::validate() const {
  if (!variant_supported(bp_, variant_))
    throw UnsupportedVariant("variant '" + std::string(to_string(variant_)) +
                             "' is not defined for BP" + std::string(to_string(bp_)));
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_))
    throw std::invalid_argument("lambda must be finite and >= 0");
  if (!factors_) throw std::invalid_argument("geometric factors missing");
  const bool gll = bp_ == Benchmark::BP3_5;
  const auto want_set = gll ? PointSet::GLL : PointSet::GL;
  const auto want_n = static_cast<std::size_t>(gll ? gll_points(degree_) : gl_points(degree_));
  if (factors_->point_set() != want_set || factors_->points_1d() != want_n)
    throw ShapeError("geometric factors do not match the benchmark point set");
}

OperatorInstance OperatorInstance::with_variant(Variant v) const {
  OperatorInstance copy = *this;
  copy.variant_ = v;
  copy.validate();
  return copy;
}

OperatorInstance OperatorInstance::with_lambda(double lambda) const {
  OperatorInstance copy = *this;
  copy.lambda_ = lambda;
  copy.validate();
  return copy;
}

// ---------------------------------------------------------------------------
// Instrumented element kernels

namespace {

constexpr std::size_t kMaxPoints1d = static_cast<std::size_t>(gl_points(kMaxDegree));
constexpr std::uint64_t kWord = sizeof(double);

enum class Space { Global, Scratch };

struct Tally {
  AccessCounters c;

  void read(Space s, std::uint64_t n) {
    (s == Space::Global ? c.global_read_bytes : c.scratch_read_bytes) += kWord * n;
  }
  void write(Space s, std::uint64_t n) {
    (s == Space::Global ? c.global_write_bytes : c.scratch_write_bytes) += kWord * n;
  }
  // Operator-matrix entries are staged in scratch once per kernel.
  void matrix(std::uint64_t n, bool interp) {
    c.scratch_read_bytes += kWord * n;
    if (interp) c.interp_read_bytes += kWord * n;
  }
  void flops(std::uint64_t n) { c.flops += n; }
  void barrier() { ++c.syncs; }
};

struct In {
  const double* p;
  Extents3 ext;
  Space space;
};

struct Out {
  double* p;
  Extents3 ext;
  Space space;
  In view() const { return {p, ext, space}; }
};

struct Mat {
  const OperatorMatrix& m;
  bool interp;  // counts toward interp_read_bytes
};

// Visit the start (k, j, i) of every fiber along `axis` of `ext`.
template <class Fn>
void for_each_fiber(const Extents3& ext, int axis, Fn&& fn) {
  for (std::size_t k = 0; k < (axis == 2 ? 1 : ext[2]); ++k)
    for (std::size_t j = 0; j < (axis == 1 ? 1 : ext[1]); ++j)
      for (std::size_t i = 0; i < (axis == 0 ? 1 : ext[0]); ++i) fn(k, j, i);
}

std::size_t flat(const Extents3& e, std::size_t k, std::size_t j, std::size_t i) {
  return (k * e[1] + j) * e[0] + i;
}

// Rows a and rows-1-a of a centro-symmetric matrix share their entries in
// reversed column order, so one load of m(a, b) feeds both outputs.
void symmetric_fiber(const OperatorMatrix& m, const double* x, double* y, Tally& t) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  for (std::size_t a = 0; a < rows / 2; ++a) {
    const std::size_t a2 = rows - 1 - a;
    double s1 = y[a];
    double s2 = y[a2];
    for (std::size_t b = 0; b < cols; ++b) {
      const double v = m(a, b);
      s1 += v * x[b];
      s2 += v * x[cols - 1 - b];
    }
    y[a] = s1;
    y[a2] = s2;
    t.matrix(cols, true);
    t.flops(4 * cols);
  }
  if (rows % 2 == 1) {
    // The middle row is itself palindromic.
    const std::size_t mid = rows / 2;
    double s = y[mid];
    for (std::size_t b = 0; b < cols / 2; ++b) {
      const double v = m(mid, b);
      s += v * x[b];
      s += v * x[cols - 1 - b];
      t.matrix(1, true);
      t.flops(4);
    }
    if (cols % 2 == 1) {
      s += m(mid, cols / 2) * x[cols / 2];
      t.matrix(1, true);
      t.flops(2);
    }
    y[mid] = s;
  }
}

// Fiber-cached contraction: each input fiber is read once into registers and
// each output entry written once. `base`, when given, seeds the accumulation
// and may alias `out`.
void contract_cached(Mat mat, bool symmetric, In in, int axis, Out out, const In* base, Tally& t) {
  const OperatorMatrix& m = mat.m;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const std::size_t si = in.ext.stride(axis);
  const std::size_t so = out.ext.stride(axis);
  std::array<double, kMaxPoints1d> x{};
  std::array<double, kMaxPoints1d> y{};

  for_each_fiber(out.ext, axis, [&](std::size_t k, std::size_t j, std::size_t i) {
    const std::size_t ib = flat(in.ext, k, j, i);
    const std::size_t ob = flat(out.ext, k, j, i);
    for (std::size_t b = 0; b < cols; ++b) x[b] = in.p[ib + b * si];
    t.read(in.space, cols);
    for (std::size_t a = 0; a < rows; ++a) y[a] = base ? base->p[ob + a * so] : 0.0;
    if (base) t.read(base->space, rows);

    if (symmetric) {
      symmetric_fiber(m, x.data(), y.data(), t);
    } else {
      for (std::size_t a = 0; a < rows; ++a) {
        double s = y[a];
        for (std::size_t b = 0; b < cols; ++b) s += m(a, b) * x[b];
        y[a] = s;
      }
      t.matrix(rows * cols, mat.interp);
      t.flops(2 * rows * cols);
    }

    for (std::size_t a = 0; a < rows; ++a) out.p[ob + a * so] = y[a];
    t.write(out.space, rows);
  });
}

// Reference-kernel contraction: every multiply-add re-reads its operand from
// the source buffer. Output is produced one slowest-index slice at a time
// over `slices` iterations (slices beyond the extent are idle), with an
// optional barrier after each.
void contract_direct(Mat mat, In in, int axis, Out out, const In* base, std::size_t slices,
                     bool barrier_per_slice, Tally& t) {
  const OperatorMatrix& m = mat.m;
  const std::size_t cols = m.cols();
  const std::size_t si = in.ext.stride(axis);
  for (std::size_t k = 0; k < slices; ++k) {
    if (k < out.ext[2]) {
      for (std::size_t j = 0; j < out.ext[1]; ++j)
        for (std::size_t i = 0; i < out.ext[0]; ++i) {
          const std::size_t o = flat(out.ext, k, j, i);
          const std::size_t idx[3] = {i, j, k};
          const std::size_t a = idx[axis];
          // input offset with the contracted coordinate zeroed
          const std::size_t ib = flat(in.ext, axis == 2 ? 0 : k, axis == 1 ? 0 : j, axis == 0 ? 0 : i);
          double s = 0.0;
          if (base) {
            s = base->p[o];
            t.read(base->space, 1);
          }
          for (std::size_t b = 0; b < cols; ++b) s += m(a, b) * in.p[ib + b * si];
          out.p[o] = s;
          t.read(in.space, cols);
          t.matrix(cols, mat.interp);
          t.flops(2 * cols);
          t.write(out.space, 1);
        }
    }
    if (barrier_per_slice) t.barrier();
  }
}

struct Schedule {
  std::size_t slices;
  bool barrier_per_slice;
};

// Pointwise pass over the points of `ext`, grouped in slowest-index slices.
template <class Fn>
void pointwise(const Extents3& ext, Schedule sched, Tally& t, Fn&& fn) {
  if (sched.slices < ext[2]) throw std::logic_error("pointwise: fewer slices than planes");
  const std::size_t plane = ext[0] * ext[1];
  for (std::size_t k = 0; k < sched.slices; ++k) {
    if (k < ext[2])
      for (std::size_t p = k * plane; p < (k + 1) * plane; ++p) fn(p);
    if (sched.barrier_per_slice) t.barrier();
  }
}

void stage_copy(In src, Out dst, Tally& t) {
  std::copy(src.p, src.p + src.ext.size(), dst.p);
  t.read(src.space, src.ext.size());
  t.write(dst.space, src.ext.size());
}

void scale_by_jacobian(Out buf, const double* gwj, Schedule sched, Tally& t) {
  pointwise(buf.ext, sched, t, [&](std::size_t p) { buf.p[p] *= gwj[p]; });
  const std::size_t n = buf.ext.size();
  t.read(buf.space, n);
  t.read(Space::Global, n);
  t.write(buf.space, n);
  t.flops(n);
}

// (qr, qs, qt) -> (rqr, rqs, rqt) = G (qr, qs, qt), in place.
void chain_rule(Out qr, Out qs, Out qt, const GeometricFactors& g, std::size_t e, Schedule sched,
                Tally& t) {
  const double* grr = g.factor(e, Factor::Grr).data();
  const double* grs = g.factor(e, Factor::Grs).data();
  const double* grt = g.factor(e, Factor::Grt).data();
  const double* gss = g.factor(e, Factor::Gss).data();
  const double* gst = g.factor(e, Factor::Gst).data();
  const double* gtt = g.factor(e, Factor::Gtt).data();
  pointwise(qr.ext, sched, t, [&](std::size_t p) {
    const double r = qr.p[p], s = qs.p[p], u = qt.p[p];
    qr.p[p] = grr[p] * r + grs[p] * s + grt[p] * u;
    qs.p[p] = grs[p] * r + gss[p] * s + gst[p] * u;
    qt.p[p] = grt[p] * r + gst[p] * s + gtt[p] * u;
  });
  const std::size_t n = qr.ext.size();
  t.read(qr.space, 3 * n);
  t.read(Space::Global, 6 * n);
  t.write(qr.space, 3 * n);
  t.flops(15 * n);
}

// acc = lambda * GwJ * q
void lambda_mass(In q, const double* gwj, double lambda, Out acc, Tally& t) {
  const std::size_t n = q.ext.size();
  for (std::size_t p = 0; p < n; ++p) acc.p[p] = lambda * gwj[p] * q.p[p];
  t.read(q.space, n);
  t.read(Space::Global, n);
  t.write(acc.space, n);
  t.flops(2 * n);
}

struct Workspace {
  explicit Workspace(std::size_t n) {
    for (auto& b : buf) b.assign(n, 0.0);
  }
  std::array<std::vector<double>, 7> buf;
  double* operator[](std::size_t i) { return buf[i].data(); }
};

class ElementKernel {
 public:
  explicit ElementKernel(const OperatorInstance& op)
      : op_(op), nq_(op.gll_1d()), ng_(op.gl_1d()) {}

  void run(std::size_t e, std::span<const double> q, std::span<double> y, Workspace& w,
           Tally& t) const {
    const In qin{q.data(), Extents3::cube(nq_), Space::Global};
    const Out yout{y.data(), Extents3::cube(nq_), Space::Global};
    const bool baseline = op_.variant() == Variant::Baseline;
    switch (op_.bp()) {
      case Benchmark::BP1_0:
        baseline ? bp1_baseline(e, qin, yout, w, t) : bp1_fused(e, qin, yout, w, t);
        break;
      case Benchmark::BP3_5:
        baseline ? bp35_baseline(e, qin, yout, w, t) : bp35_fused(e, qin, yout, w, t);
        break;
      case Benchmark::BP3_0:
        baseline ? bp3_baseline(e, qin, yout, w, t) : bp3_fused(e, qin, yout, w, t);
        break;
    }
  }

 private:
  Mat interp() const { return {op_.interp(), true}; }
  Mat interp_t() const { return {op_.interp_t(), true}; }
  Mat diff() const { return {op_.diff(), false}; }
  Mat diff_t() const { return {op_.diff_t(), false}; }
  bool symmetric() const { return op_.variant() == Variant::SymFused; }
  const double* gwj(std::size_t e) const { return op_.factors().factor(e, Factor::GwJ).data(); }

  // Extents along the interpolation sequence (j, then i, then k).
  Extents3 after_j() const { return {{nq_, ng_, nq_}}; }
  Extents3 after_ji() const { return {{ng_, ng_, nq_}}; }
  Extents3 gl() const { return Extents3::cube(ng_); }
  // ... and along the projection sequence.
  Extents3 proj_j() const { return {{ng_, nq_, ng_}}; }
  Extents3 proj_ji() const { return {{nq_, nq_, ng_}}; }

  // Fused interpolation: three stages, barrier after each.
  void interp_fused(In q, Out dst, Out tmp1, Out tmp2, Tally& t) const {
    contract_cached(interp(), symmetric(), q, 1, tmp1, nullptr, t);
    t.barrier();
    contract_cached(interp(), symmetric(), tmp1.view(), 0, tmp2, nullptr, t);
    t.barrier();
    contract_cached(interp(), symmetric(), tmp2.view(), 2, dst, nullptr, t);
  }

  // Fused projection; the caller has issued the barrier before it.
  void project_fused(In src, Out y, Out tmp1, Out tmp2, Tally& t) const {
    contract_cached(interp_t(), symmetric(), src, 1, tmp1, nullptr, t);
    t.barrier();
    contract_cached(interp_t(), symmetric(), tmp1.view(), 0, tmp2, nullptr, t);
    t.barrier();
    contract_cached(interp_t(), symmetric(), tmp2.view(), 2, y, nullptr, t);
  }

  void bp1_fused(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const Out a{w[0], after_j(), Space::Scratch};
    const Out b{w[1], after_ji(), Space::Scratch};
    const Out qg{w[2], gl(), Space::Scratch};
    interp_fused(q, qg, a, b, t);
    scale_by_jacobian(qg, gwj(e), {ng_, false}, t);
    t.barrier();
    project_fused(qg.view(), y, Out{w[0], proj_j(), Space::Scratch},
                  Out{w[1], proj_ji(), Space::Scratch}, t);
  }

  void bp1_baseline(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const std::size_t slices = ng_;
    t.barrier();  // interpolation matrix staged
    const Out a{w[0], after_j(), Space::Global};
    const Out b{w[1], after_ji(), Space::Global};
    const Out qg{w[2], gl(), Space::Global};
    contract_direct(interp(), q, 1, a, nullptr, slices, true, t);
    contract_direct(interp(), a.view(), 0, b, nullptr, slices, true, t);
    contract_direct(interp(), b.view(), 2, qg, nullptr, slices, true, t);
    scale_by_jacobian(qg, gwj(e), {ng_, false}, t);
    const Out c{w[3], proj_j(), Space::Global};
    const Out d{w[4], proj_ji(), Space::Global};
    contract_direct(interp_t(), qg.view(), 1, c, nullptr, slices, true, t);
    contract_direct(interp_t(), c.view(), 0, d, nullptr, slices, true, t);
    contract_direct(interp_t(), d.view(), 2, y, nullptr, slices, false, t);
  }

  void bp35_fused(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const Extents3 ext = Extents3::cube(nq_);
    const Out qs{w[0], ext, Space::Scratch};
    const Out dr{w[1], ext, Space::Scratch};
    const Out ds{w[2], ext, Space::Scratch};
    const Out dt{w[3], ext, Space::Scratch};
    const Out acc{w[4], ext, Space::Scratch};
    stage_copy(q, qs, t);
    t.barrier();
    contract_cached(diff(), false, qs.view(), 0, dr, nullptr, t);
    contract_cached(diff(), false, qs.view(), 1, ds, nullptr, t);
    contract_cached(diff(), false, qs.view(), 2, dt, nullptr, t);
    chain_rule(dr, ds, dt, op_.factors(), e, {nq_, false}, t);
    t.barrier();
    lambda_mass(qs.view(), gwj(e), op_.lambda(), acc, t);
    const In accv = acc.view();
    contract_cached(diff_t(), false, dr.view(), 0, acc, &accv, t);
    contract_cached(diff_t(), false, ds.view(), 1, acc, &accv, t);
    contract_cached(diff_t(), false, dt.view(), 2, y, &accv, t);
  }

  void bp35_baseline(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const Extents3 ext = Extents3::cube(nq_);
    const std::size_t slices = nq_;
    const Out dr{w[0], ext, Space::Global};
    const Out ds{w[1], ext, Space::Global};
    const Out dt{w[2], ext, Space::Global};
    const Out acc{w[3], ext, Space::Global};
    t.barrier();  // differentiation matrix staged
    contract_direct(diff(), q, 0, dr, nullptr, slices, false, t);
    contract_direct(diff(), q, 1, ds, nullptr, slices, false, t);
    contract_direct(diff(), q, 2, dt, nullptr, slices, false, t);
    chain_rule(dr, ds, dt, op_.factors(), e, {slices, true}, t);
    lambda_mass(q, gwj(e), op_.lambda(), acc, t);
    const In accv = acc.view();
    contract_direct(diff_t(), dr.view(), 0, acc, &accv, slices, false, t);
    contract_direct(diff_t(), ds.view(), 1, acc, &accv, slices, false, t);
    contract_direct(diff_t(), dt.view(), 2, y, &accv, slices, false, t);
  }

  void bp3_fused(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const Out qg{w[2], gl(), Space::Scratch};
    interp_fused(q, qg, Out{w[0], after_j(), Space::Scratch}, Out{w[1], after_ji(), Space::Scratch},
                 t);
    t.barrier();
    const Out dr{w[3], gl(), Space::Scratch};
    const Out ds{w[4], gl(), Space::Scratch};
    const Out dt{w[5], gl(), Space::Scratch};
    const Out acc{w[6], gl(), Space::Scratch};
    contract_cached(diff(), false, qg.view(), 0, dr, nullptr, t);
    contract_cached(diff(), false, qg.view(), 1, ds, nullptr, t);
    contract_cached(diff(), false, qg.view(), 2, dt, nullptr, t);
    chain_rule(dr, ds, dt, op_.factors(), e, {ng_, false}, t);
    t.barrier();
    // lambda term uses the field interpolated to the GL points
    lambda_mass(qg.view(), gwj(e), op_.lambda(), acc, t);
    const In accv = acc.view();
    contract_cached(diff_t(), false, dr.view(), 0, acc, &accv, t);
    contract_cached(diff_t(), false, ds.view(), 1, acc, &accv, t);
    contract_cached(diff_t(), false, dt.view(), 2, acc, &accv, t);
    t.barrier();
    project_fused(accv, y, Out{w[0], proj_j(), Space::Scratch},
                  Out{w[1], proj_ji(), Space::Scratch}, t);
  }

  void bp3_baseline(std::size_t e, In q, Out y, Workspace& w, Tally& t) const {
    const std::size_t slices = ng_;
    t.barrier();  // operator matrices staged
    const Out a{w[0], after_j(), Space::Global};
    const Out b{w[1], after_ji(), Space::Global};
    const Out qg{w[2], gl(), Space::Global};
    contract_direct(interp(), q, 1, a, nullptr, slices, true, t);
    contract_direct(interp(), a.view(), 0, b, nullptr, slices, true, t);
    contract_direct(interp(), b.view(), 2, qg, nullptr, slices, true, t);
    const Out dr{w[3], gl(), Space::Global};
    const Out ds{w[4], gl(), Space::Global};
    const Out dt{w[5], gl(), Space::Global};
    const Out acc{w[6], gl(), Space::Global};
    contract_direct(diff(), qg.view(), 0, dr, nullptr, slices, false, t);
    contract_direct(diff(), qg.view(), 1, ds, nullptr, slices, false, t);
    contract_direct(diff(), qg.view(), 2, dt, nullptr, slices, false, t);
    chain_rule(dr, ds, dt, op_.factors(), e, {slices, true}, t);
    lambda_mass(qg.view(), gwj(e), op_.lambda(), acc, t);
    const In accv = acc.view();
    contract_direct(diff_t(), dr.view(), 0, acc, &accv, slices, false, t);
    contract_direct(diff_t(), ds.view(), 1, acc, &accv, slices, false, t);
    contract_direct(diff_t(), dt.view(), 2, acc, &accv, slices, true, t);
    const Out c{w[0], proj_j(), Space::Global};
    const Out d{w[1], proj_ji(), Space::Global};
    contract_direct(interp_t(), accv, 1, c, nullptr, slices, true, t);
    contract_direct(interp_t(), c.view(), 0, d, nullptr, slices, true, t);
    contract_direct(interp_t(), d.view(), 2, y, nullptr, slices, false, t);
  }

  const OperatorInstance& op_;
  std::size_t nq_;
  std::size_t ng_;
};

void check_input(const OperatorInstance& op, const FieldVector& q) {
  if (q.n_el() != op.n_el() || q.n_p() != op.points_per_element())
    throw ShapeError("field vector is " + std::to_string(q.n_el()) + " x " +
                     std::to_string(q.n_p()) + ", operator expects " + std::to_string(op.n_el()) +
                     " x " + std::to_string(op.points_per_element()));
  for (double v : q.data())
    if (!std::isfinite(v)) throw NonFiniteInput("field vector contains non-finite values");
}

}  // namespace

FieldVector apply(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                  int threads) {
  check_input(op, q);
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  const std::size_t n_el = op.n_el();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n_el, 1));
  const std::size_t buffer = op.gl_1d() * op.gl_1d() * op.gl_1d();
  FieldVector y(n_el, op.points_per_element());
  const ElementKernel kernel(op);

  std::vector<Tally> tallies(workers);
  auto work = [&](std::size_t w) {
    const std::size_t begin = n_el * w / workers;
    const std::size_t end = n_el * (w + 1) / workers;
    Workspace ws(buffer);
    for (std::size_t e = begin; e < end; ++e) kernel.run(e, q.element(e), y.element(e), ws, tallies[w]);
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& t : tallies) counters += t.c;
  return y;
}

namespace {
void require_bp(const OperatorInstance& op, Benchmark bp) {
  if (op.bp() != bp)
    throw std::invalid_argument("operator is BP" + std::string(to_string(op.bp())) +
                                ", expected BP" + std::string(to_string(bp)));
}
}  // namespace

FieldVector apply_bp1(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                      int threads) {
  require_bp(op, Benchmark::BP1_0);
  return apply(op, q, counters, threads);
}

FieldVector apply_bp35(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                       int threads) {
  require_bp(op, Benchmark::BP3_5);
  return apply(op, q, counters, threads);
}

FieldVector apply_bp3(const OperatorInstance& op, const FieldVector& q, AccessCounters& counters,
                      int threads) {
  require_bp(op, Benchmark::BP3_0);
  return apply(op, q, counters, threads);
}

Tensor3 interpolate_to_gl(const Tensor3& q, const OperatorMatrix& interp) {
  return contract_dim(interp, contract_dim(interp, contract_dim(interp, q, 1), 0), 2);
}

Tensor3 project_to_gll(const Tensor3& q, const OperatorMatrix& interp) {
  const OperatorMatrix t = interp.transposed();
  return contract_dim(t, contract_dim(t, contract_dim(t, q, 1), 0), 2);
}

AccessCounters element_counts(Benchmark bp, Variant v, int degree) {
  const HexMesh mesh = build_cube_mesh(1, 2.0);
  const OperatorInstance op(bp, degree, mesh, 1.0, v);
  FieldVector q(1, op.points_per_element(), 1.0);
  AccessCounters c;
  apply(op, q, c);
  return c;
}

}  // namespace hofem
