#include "hofem/perf_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <new>
#include <stdexcept>
#include <thread>

#include "hofem/errors.hpp"

namespace hofem {

namespace {

struct Cardinalities {
  std::uint64_t nq, ng, np, npg;
};

Cardinalities cardinalities(int degree) {
  check_degree(degree);
  const auto nq = static_cast<std::uint64_t>(gll_points(degree));
  const auto ng = static_cast<std::uint64_t>(gl_points(degree));
  return {nq, ng, nq * nq * nq, ng * ng * ng};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

TrafficModel traffic(Benchmark bp, int degree, std::size_t n_el) {
  const auto c = cardinalities(degree);
  if (n_el == 0) throw std::invalid_argument("traffic: n_el must be >= 1");
  TrafficModel t;
  t.bp = bp;
  t.degree = degree;
  t.n_el = n_el;
  switch (bp) {
    case Benchmark::BP1_0: t.reads_doubles = c.np + c.npg; break;
    case Benchmark::BP3_5: t.reads_doubles = 8 * c.np; break;
    case Benchmark::BP3_0: t.reads_doubles = c.np + 7 * c.npg; break;
  }
  t.writes_doubles = c.np;
  t.total_doubles = t.reads_doubles + t.writes_doubles;
  t.flops = flop_model(bp, Variant::Fused, degree);
  return t;
}

std::uint64_t flop_model(Benchmark bp, Variant v, int degree) {
  if (!variant_supported(bp, v))
    throw UnsupportedVariant("variant not defined for this benchmark");
  const auto [q, g, np, npg] = cardinalities(degree);
  // GLL <-> GL transfer: contractions along j, i, k (or their transposes).
  const std::uint64_t transfer = 2 * (q * q * q * g + q * q * g * g + q * g * g * g);
  switch (bp) {
    case Benchmark::BP1_0: return 2 * transfer + npg;
    case Benchmark::BP3_5: return 12 * np * q + 17 * np;
    case Benchmark::BP3_0: return 2 * transfer + 12 * npg * g + 17 * npg;
  }
  return 0;
}

std::uint64_t sync_model(Benchmark bp, Variant v, int degree) {
  if (!variant_supported(bp, v))
    throw UnsupportedVariant("variant not defined for this benchmark");
  const auto c = cardinalities(degree);
  // Stage boundaries of the fused schedule; the baseline pays one barrier per
  // slice at each boundary plus one for staging the operator matrices.
  if (v == Variant::Baseline) {
    switch (bp) {
      case Benchmark::BP1_0: return 5 * c.ng + 1;
      case Benchmark::BP3_5: return c.nq + 1;
      case Benchmark::BP3_0: return 7 * c.ng + 1;
    }
  }
  switch (bp) {
    case Benchmark::BP1_0: return 5;
    case Benchmark::BP3_5: return 2;
    case Benchmark::BP3_0: return 7;
  }
  return 0;
}

BandwidthCalibration measure_stream_bandwidth(std::size_t bytes, int trials, int threads) {
  if (bytes < (std::size_t{1} << 20)) throw std::invalid_argument("calibration needs >= 1 MiB");
  if (trials < 3) throw std::invalid_argument("calibration needs >= 3 trials");
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");

  std::vector<unsigned char> src, dst;
  try {
    src.assign(bytes, 1);
    dst.assign(bytes, 0);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate " + std::to_string(2 * bytes) + " bytes for calibration");
  }

  auto copy_once = [&] {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    if (threads == 1) {
      std::memcpy(dst.data(), src.data(), bytes);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < threads; ++w) {
        const std::size_t b = bytes * w / threads;
        const std::size_t e = bytes * (w + 1) / threads;
        pool.emplace_back([&, b, e] { std::memcpy(dst.data() + b, src.data() + b, e - b); });
      }
    }
    const auto t1 = clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };

  BandwidthCalibration cal;
  cal.bytes = bytes;
  cal.threads = threads;
  cal.warmup_seconds = copy_once();
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    src[static_cast<std::size_t>(t) % bytes] ^= 1;  // keep the copies observable
    double s = copy_once();
    if (!(s > 0.0)) s = 1e-9;  // clock granularity floor
    cal.trial_seconds.push_back(s);
    sum += static_cast<double>(bytes) / s;
  }
  [[maybe_unused]] volatile unsigned char sink = dst[bytes / 2];
  cal.mean_bandwidth = sum / trials;
  return cal;
}

double roofline_global(double bandwidth, double flops, double read_bytes, double write_bytes) {
  require_positive(bandwidth, "bandwidth");
  require_positive(flops, "flops");
  if (!(read_bytes >= 0.0 && write_bytes >= 0.0))
    throw std::invalid_argument("byte counts must be non-negative");
  require_positive(read_bytes + write_bytes, "d_r + d_w");
  return bandwidth * flops / (write_bytes + read_bytes);
}

double shared_bandwidth_ansatz(double sm_count, double simd_width, double word_bytes,
                               double clock_ghz) {
  require_positive(sm_count, "SM count");
  require_positive(simd_width, "SIMD width");
  require_positive(word_bytes, "word length");
  require_positive(clock_ghz, "clock");
  return sm_count * simd_width * word_bytes * clock_ghz * 1e9;
}

double shared_bandwidth_ansatz(const SharedMemoryHardware& hw) {
  return shared_bandwidth_ansatz(hw.sm_count, hw.simd_width, hw.word_bytes, hw.clock_ghz);
}

double roofline_shared(double bandwidth, double flops, double read_bytes, double write_bytes) {
  require_positive(bandwidth, "shared bandwidth");
  require_positive(flops, "flops");
  if (!(read_bytes >= 0.0 && write_bytes >= 0.0))
    throw std::invalid_argument("byte counts must be non-negative");
  require_positive(read_bytes + write_bytes, "s_r + s_w");
  return bandwidth * flops / (read_bytes + write_bytes);
}

double composite_roofline(double r_global, double r_shared) { return std::min(r_global, r_shared); }

bool has_shared_roofline(Benchmark bp) { return bp != Benchmark::BP3_5; }

RooflineSeries roofline_series(Benchmark bp, Variant variant, int degree_min, int degree_max,
                               std::size_t n_el, double bandwidth, const SharedMemoryHardware& hw) {
  check_degree(degree_min);
  check_degree(degree_max);
  if (degree_min > degree_max) throw std::invalid_argument("empty degree range");
  require_positive(bandwidth, "bandwidth");
  if (!variant_supported(bp, variant))
    throw UnsupportedVariant("variant not defined for this benchmark");

  RooflineSeries s;
  s.bp = bp;
  s.variant = variant;
  s.n_el = n_el;
  s.bandwidth = bandwidth;
  if (has_shared_roofline(bp)) s.shared_bandwidth = shared_bandwidth_ansatz(hw);

  const double el = static_cast<double>(n_el);
  for (int n = degree_min; n <= degree_max; ++n) {
    const auto t = traffic(bp, n, n_el);
    RooflinePoint p;
    p.degree = n;
    p.flops = el * static_cast<double>(flop_model(bp, variant, n));
    const double reads = el * 8.0 * static_cast<double>(t.reads_doubles);
    const double writes = el * 8.0 * static_cast<double>(t.writes_doubles);
    p.bytes = reads + writes;
    p.r_global = roofline_global(bandwidth, p.flops, reads, writes);
    if (s.shared_bandwidth) {
      const auto c = element_counts(bp, variant, n);
      const double sr = el * static_cast<double>(c.scratch_read_bytes);
      const double sw = el * static_cast<double>(c.scratch_write_bytes);
      p.scratch_bytes = sr + sw;
      p.r_shared = roofline_shared(*s.shared_bandwidth, p.flops, sr, sw);
    }
    s.points.push_back(p);
  }
  return s;
}

}  // namespace hofem
