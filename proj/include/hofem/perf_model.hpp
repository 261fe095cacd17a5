#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hofem/operators.hpp"

namespace hofem {

/// Minimum global traffic per element, in doubles, and the FLOP count of one
/// element application.
///
///            reads             writes   total
///   BP1.0    Np + NpGL         Np       2 Np + NpGL
///   BP3.5    8 Np              Np       9 Np
///   BP3.0    Np + 7 NpGL       Np       2 Np + 7 NpGL
///
/// with Np = (N+1)^3 and NpGL = (N+2)^3.
struct TrafficModel {
  Benchmark bp = Benchmark::BP1_0;
  int degree = 1;
  std::size_t n_el = 1;
  std::uint64_t reads_doubles = 0;
  std::uint64_t writes_doubles = 0;
  std::uint64_t total_doubles = 0;
  std::uint64_t flops = 0;

  /// 8 (R + W) per element: bytes moved to and from global memory.
  std::uint64_t bytes_per_element() const { return 8 * total_doubles; }
  /// Size of the equivalent copy, 8 n_el T / 2; the bus moves data both ways.
  double copy_bytes() const { return 8.0 * static_cast<double>(n_el) * total_doubles / 2.0; }
};

TrafficModel traffic(Benchmark bp, int degree, std::size_t n_el);

/// Closed-form FLOPs of one element application under the counting
/// convention of the operator kernels: a multiply-add counts 2, a pointwise
/// scale 1, each chain-rule output 5, the lambda mass term 2 per point.
std::uint64_t flop_model(Benchmark bp, Variant v, int degree);

/// Closed-form barrier count of one element application.
std::uint64_t sync_model(Benchmark bp, Variant v, int degree);

/// Host memory-to-memory copy bandwidth.
struct BandwidthCalibration {
  std::size_t bytes = 0;
  int threads = 1;
  double warmup_seconds = 0.0;
  std::vector<double> trial_seconds;  // warm-up excluded
  double mean_bandwidth = 0.0;        // mean of bytes / time over the trials, bytes/s
  double theoretical_peak = 549e9;    // bytes/s
};

/// Copies `bytes` between two buffers once as warm-up and then `trials` timed
/// times. Throws std::invalid_argument (bytes < 1 MiB, trials < 3) or
/// ResourceError when the buffers cannot be allocated.
BandwidthCalibration measure_stream_bandwidth(std::size_t bytes, int trials = 10,
                                              int threads = 1);

/// B_gl F / (d_r + d_w)
double roofline_global(double bandwidth, double flops, double read_bytes, double write_bytes);

/// Defaults reproduce a 56-SM, 32-lane, 4-byte, 1.328 GHz device.
struct SharedMemoryHardware {
  double sm_count = 56;
  double simd_width = 32;
  double word_bytes = 4;
  double clock_ghz = 1.328;
};

/// #SMs x SIMD width x word length x clock, in bytes/s.
double shared_bandwidth_ansatz(double sm_count, double simd_width, double word_bytes,
                               double clock_ghz);
double shared_bandwidth_ansatz(const SharedMemoryHardware& hw = {});

/// B_sh F / (s_r + s_w)
double roofline_shared(double bandwidth, double flops, double read_bytes, double write_bytes);

/// min(R_global, R_shared)
double composite_roofline(double r_global, double r_shared);

struct RooflinePoint {
  int degree = 1;
  double flops = 0.0;  // whole mesh
  double bytes = 0.0;  // global d_r + d_w, whole mesh
  double r_global = 0.0;
  std::optional<double> scratch_bytes;  // s_r + s_w, whole mesh
  std::optional<double> r_shared;
  std::optional<double> achieved;
};

struct RooflineSeries {
  Benchmark bp = Benchmark::BP1_0;
  Variant variant = Variant::Fused;
  std::size_t n_el = 0;
  double bandwidth = 0.0;  // B_gl, bytes/s
  std::optional<double> shared_bandwidth;
  std::vector<RooflinePoint> points;
};

/// True for the benchmarks that carry a shared-memory roofline (BP1.0, BP3.0).
bool has_shared_roofline(Benchmark bp);

/// Model series over [degree_min, degree_max]. Global bytes come from the
/// traffic model; scratch bytes from instrumented single-element counts of
/// `variant`. R_shared is filled only where has_shared_roofline(bp).
RooflineSeries roofline_series(Benchmark bp, Variant variant, int degree_min, int degree_max,
                               std::size_t n_el, double bandwidth,
                               const SharedMemoryHardware& hw = {});

}  // namespace hofem
