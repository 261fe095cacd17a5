#include "hofem/bench_cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "hofem/dense_oracle.hpp"
#include "hofem/errors.hpp"
#include "hofem/perf_model.hpp"

namespace hofem::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kExtent = 2.0;
constexpr double kVerifyPerturbation = 0.2;
constexpr int kSymmetryPairs = 10;

int parse_int(std::string_view s, bool& ok) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  ok = r.ec == std::errc() && r.ptr == end;
  return v;
}

// ---------------------------------------------------------------- helpers

std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> salt) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : salt) words.push_back(static_cast<std::uint32_t>(s));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

FieldVector random_field(std::size_t n_el, std::size_t n_p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldVector f(n_el, n_p);
  for (auto& v : f.data()) v = u(rng);
  return f;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double rel_inf_error(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  const double s = max_abs(b);
  return d / (s > 0.0 ? s : 1.0);
}

std::string machine_descriptor() {
  std::ostringstream s;
#if defined(__x86_64__)
  s << "x86_64";
#elif defined(__aarch64__)
  s << "aarch64";
#else
  s << "unknown-arch";
#endif
  s << ", " << std::thread::hardware_concurrency() << " hardware threads";
#if defined(__VERSION__)
  s << ", compiler " << __VERSION__;
#endif
  return s.str();
}

std::vector<Variant> variants_for(Benchmark bp, const RunConfig& cfg) {
  if (cfg.variant) return {*cfg.variant};
  std::vector<Variant> v;
  for (auto x : kAllVariants)
    if (variant_supported(bp, x)) v.push_back(x);
  return v;
}

json config_json(const RunConfig& cfg, std::size_t n_el) {
  json bps = json::array();
  for (auto bp : cfg.bps) bps.push_back(to_string(bp));
  json j;
  j["bp"] = bps;
  j["degrees"] = {cfg.degrees.min, cfg.degrees.max};
  j["elements_per_side"] = cfg.elements_per_side;
  j["n_el"] = n_el;
  j["variant"] = cfg.variant ? json(std::string(to_string(*cfg.variant))) : json(nullptr);
  j["lambda"] = cfg.lambda;
  j["repeats"] = cfg.repeats;
  j["threads"] = cfg.threads;
  j["seed"] = cfg.seed;
  j["format"] = cfg.format;
  return j;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path);
  if (!f) throw ResourceError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw ResourceError("failed writing " + path.string());
}

// Report either to --out or to the output stream.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  } else {
    write_text(cfg.out, text);
    out << "wrote " << cfg.out << '\n';
  }
}

struct Timing {
  std::vector<double> trials;
  double median = 0.0;
  double mean = 0.0;
  AccessCounters counters;
  FieldVector output;
};

// One untimed warm-up (whose counters are kept), then `repeats` timed runs.
Timing time_apply(const OperatorInstance& op, const FieldVector& q, int repeats, int threads) {
  Timing t;
  t.output = apply(op, q, t.counters, threads);
  for (int r = 0; r < repeats; ++r) {
    AccessCounters scratch;
    const auto t0 = std::chrono::steady_clock::now();
    auto y = apply(op, q, scratch, threads);
    const auto t1 = std::chrono::steady_clock::now();
    t.trials.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  auto sorted = t.trials;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  t.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  t.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  return t;
}

std::optional<double> resolve_bandwidth(const RunConfig& cfg, std::ostream& err, std::string& source) {
  if (cfg.bandwidth) {
    source = "supplied";
    return cfg.bandwidth;
  }
  if (cfg.measure) {
    const auto cal = measure_stream_bandwidth(cfg.calibration_bytes, 10, 1);
    source = "measured";
    err << "measured copy bandwidth " << cal.mean_bandwidth / 1e9 << " GB/s\n";
    return cal.mean_bandwidth;
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- verify

struct Check {
  std::string name;
  Benchmark bp;
  int degree;
  std::optional<Variant> variant;
  double max_error;
  double tolerance;
  bool passed;
};

class Verifier {
 public:
  explicit Verifier(const RunConfig& cfg)
      : cfg_(cfg), mesh_(build_cube_mesh(cfg.elements_per_side, kExtent,
                                         cfg.elements_per_side > 1 ? kVerifyPerturbation : 0.0,
                                         cfg.seed)),
        regular_(build_cube_mesh(cfg.elements_per_side, kExtent)) {}

  std::size_t n_el() const { return mesh_.n_el(); }
  const std::vector<Check>& checks() const { return checks_; }

  void run(Benchmark bp, int degree) {
    const double lambda = bp == Benchmark::BP1_0 ? 0.0 : cfg_.lambda;
    const OperatorInstance base(bp, degree, mesh_, lambda, Variant::Baseline);
    const auto np = base.points_per_element();
    auto rng = make_rng(cfg_.seed, {static_cast<std::uint64_t>(bp), static_cast<std::uint64_t>(degree)});
    const auto q = random_field(n_el(), np, rng);
    AccessCounters unused;
    const auto y_base = apply(base, q, unused);

    for (auto v : variants_for(bp, cfg_)) {
      const auto op = base.with_variant(v);
      AccessCounters counters;
      const auto y = apply(op, q, counters);

      if (degree <= kOracleMaxDegree) oracle(op, q, y);
      symmetry(op, rng);
      if (bp != Benchmark::BP1_0) {
        const FieldVector ones(n_el(), np, 1.0);
        record("null_space", op, max_abs(apply(op.with_lambda(0.0), ones, unused).data()), 1e-10);
      }
      volume(op);
      model_counts(op, counters);
      if (v != Variant::Baseline)
        record("variant_agreement", op, rel_inf_error(y.data(), y_base.data()), 1e-12);
      if (cfg_.threads > 1) {
        AccessCounters tc;
        const auto yt = apply(op, q, tc, cfg_.threads);
        record("thread_counters", op, tc == counters ? 0.0 : 1.0, 0.0);
        record("thread_agreement", op, rel_inf_error(yt.data(), y.data()), 1e-13);
      }
    }
  }

 private:
  void record(std::string name, const OperatorInstance& op, double err, double tol) {
    checks_.push_back({std::move(name), op.bp(), op.degree(), op.variant(), err, tol,
                       std::isfinite(err) && err <= tol});
  }

  void oracle(const OperatorInstance& op, const FieldVector& q, const FieldVector& y) {
    double worst = 0.0;
    for (std::size_t e = 0; e < n_el(); ++e) {
      const auto dense = assemble_for(op.bp(), mesh_.elements[e], op.degree(), op.lambda(), e);
      worst = std::max(worst, rel_inf_error(y.element(e), dense.multiply(q.element(e))));
    }
    record("oracle", op, worst, op.bp() == Benchmark::BP1_0 ? 1e-12 : 1e-11);
  }

  void symmetry(const OperatorInstance& op, std::mt19937_64& rng) {
    double asym = 0.0, most_negative = 0.0;
    AccessCounters unused;
    for (int t = 0; t < kSymmetryPairs; ++t) {
      const auto u = random_field(n_el(), op.points_per_element(), rng);
      const auto w = random_field(n_el(), op.points_per_element(), rng);
      const auto au = apply(op, u, unused);
      const auto aw = apply(op, w, unused);
      const double lhs = dot(au, w), rhs = dot(u, aw);
      asym = std::max(asym, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      most_negative = std::max(most_negative, -dot(au, u));
    }
    record("symmetry", op, asym, 1e-11);
    record("semidefinite", op, most_negative, 1e-10);
  }

  // Collocated GLL quadrature is exact for the volume only on affine elements,
  // so conservation is checked on the unperturbed grid.
  void volume(const OperatorInstance& op) {
    const OperatorInstance unit(op.bp(), op.degree(), regular_,
                                op.bp() == Benchmark::BP1_0 ? 0.0 : 1.0, op.variant());
    AccessCounters unused;
    const auto y = apply(unit, FieldVector(n_el(), op.points_per_element(), 1.0), unused);
    double s = 0.0;
    for (double v : y.data()) s += v;
    record("volume", op, std::abs(s - kExtent * kExtent * kExtent), 1e-10);
  }

  void model_counts(const OperatorInstance& op, const AccessCounters& c) {
    const auto el = static_cast<double>(n_el());
    const auto diff = [](double a, double b) { return std::abs(a - b); };
    record("flop_model", op,
           diff(static_cast<double>(c.flops), el * flop_model(op.bp(), op.variant(), op.degree())), 0.0);
    record("sync_model", op,
           diff(static_cast<double>(c.syncs), el * sync_model(op.bp(), op.variant(), op.degree())), 0.0);
    const double model = el * traffic(op.bp(), op.degree(), 1).bytes_per_element();
    const double counted = static_cast<double>(c.global_bytes());
    // Baseline must exceed the minimum; the fused kernels must hit it exactly.
    if (op.variant() == Variant::Baseline)
      record("global_traffic", op, counted > model ? 0.0 : model - counted + 1.0, 0.0);
    else
      record("global_traffic", op, diff(counted, model), 0.0);
  }

  const RunConfig& cfg_;
  HexMesh mesh_;
  HexMesh regular_;
  std::vector<Check> checks_;
};

json check_json(const Check& c) {
  json j;
  j["name"] = c.name;
  j["bp"] = to_string(c.bp);
  j["degree"] = c.degree;
  j["variant"] = c.variant ? json(std::string(to_string(*c.variant))) : json(nullptr);
  j["max_error"] = c.max_error;
  j["tolerance"] = c.tolerance;
  j["passed"] = c.passed;
  return j;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Verifier verifier(cfg);
  for (auto bp : cfg.bps)
    for (int n = cfg.degrees.min; n <= cfg.degrees.max; ++n) verifier.run(bp, n);

  const auto& checks = verifier.checks();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (c.passed) continue;
    ++failed;
    err << "FAIL " << c.name << " bp=" << to_string(c.bp) << " N=" << c.degree
        << " variant=" << (c.variant ? to_string(*c.variant) : "-") << " max_error=" << fmt(c.max_error)
        << " tolerance=" << fmt(c.tolerance) << '\n';
  }

  std::string text;
  if (cfg.format == "csv") {
    std::ostringstream s;
    s << "name,bp,degree,variant,max_error,tolerance,passed\n";
    for (const auto& c : checks)
      s << c.name << ',' << to_string(c.bp) << ',' << c.degree << ','
        << (c.variant ? to_string(*c.variant) : "") << ',' << fmt(c.max_error) << ','
        << fmt(c.tolerance) << ',' << (c.passed ? "true" : "false") << '\n';
    text = s.str();
  } else {
    json report;
    report["command"] = "verify";
    report["machine"] = machine_descriptor();
    report["config"] = config_json(cfg, verifier.n_el());
    report["summary"] = {{"checks", checks.size()}, {"failed", failed}};
    json failures = json::array(), all = json::array();
    for (const auto& c : checks) {
      all.push_back(check_json(c));
      if (!c.passed) failures.push_back(check_json(c));
    }
    report["failures"] = failures;
    report["checks"] = all;
    text = report.dump(2);
  }
  emit(cfg, text, out);
  err << checks.size() - failed << '/' << checks.size() << " checks passed\n";
  return failed == 0 ? kOk : kVerificationFailed;
}

// ------------------------------------------------------------------ bench

struct BenchRun {
  Benchmark bp;
  int degree;
  Variant variant;
  std::size_t n_el;
  Timing timing;
  double model_flops;
  double model_read_bytes;
  double model_write_bytes;
  std::optional<double> r_global;
  std::optional<double> r_shared;
  bool verified;
};

BenchRun bench_one(const RunConfig& cfg, const HexMesh& mesh, Benchmark bp, int degree, Variant v,
                   std::optional<double> bandwidth) {
  const double lambda = bp == Benchmark::BP1_0 ? 0.0 : cfg.lambda;
  const OperatorInstance op(bp, degree, mesh, lambda, v);
  auto rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(bp), static_cast<std::uint64_t>(degree)});
  const auto q = random_field(mesh.n_el(), op.points_per_element(), rng);

  BenchRun r{bp, degree, v, mesh.n_el(), time_apply(op, q, cfg.repeats, cfg.threads), 0, 0, 0, {}, {}, false};
  const auto el = static_cast<double>(mesh.n_el());
  const auto t = traffic(bp, degree, mesh.n_el());
  r.model_flops = el * static_cast<double>(flop_model(bp, v, degree));
  r.model_read_bytes = el * 8.0 * static_cast<double>(t.reads_doubles);
  r.model_write_bytes = el * 8.0 * static_cast<double>(t.writes_doubles);
  const auto& c = r.timing.counters;
  const double flops = static_cast<double>(c.flops);
  if (bandwidth) r.r_global = roofline_global(*bandwidth, flops, r.model_read_bytes, r.model_write_bytes);
  if (has_shared_roofline(bp))
    r.r_shared = roofline_shared(shared_bandwidth_ansatz(), flops,
                                 static_cast<double>(c.scratch_read_bytes),
                                 static_cast<double>(c.scratch_write_bytes));

  const double model_bytes = r.model_read_bytes + r.model_write_bytes;
  const double counted = static_cast<double>(c.global_bytes());
  r.verified = flops == r.model_flops &&
               static_cast<double>(c.syncs) == el * static_cast<double>(sync_model(bp, v, degree)) &&
               (v == Variant::Baseline ? counted > model_bytes : counted == model_bytes) &&
               std::all_of(r.timing.output.data().begin(), r.timing.output.data().end(),
                           [](double x) { return std::isfinite(x); });
  return r;
}

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string source;
  const auto bandwidth = resolve_bandwidth(cfg, err, source);
  const auto mesh = build_cube_mesh(cfg.elements_per_side, kExtent);
  const Variant v = cfg.variant.value_or(Variant::Fused);

  std::vector<BenchRun> runs;
  for (auto bp : cfg.bps)
    for (int n = cfg.degrees.min; n <= cfg.degrees.max; ++n) {
      runs.push_back(bench_one(cfg, mesh, bp, n, v, bandwidth));
      const auto& r = runs.back();
      err << "bp " << to_string(bp) << " N=" << n << ": " << fmt(r.timing.median) << " s median, "
          << static_cast<double>(r.timing.counters.flops) / r.timing.median / 1e9 << " GFLOP/s\n";
    }

  std::string text;
  if (cfg.format == "csv") {
    std::ostringstream s;
    s << "bp,degree,variant,n_el,threads,repeats,time_median_s,time_mean_s,flops,"
         "achieved_median,achieved_mean,global_read_bytes,global_write_bytes,scratch_read_bytes,"
         "scratch_write_bytes,model_bytes,bandwidth,r_global,r_shared,verification\n";
    for (const auto& r : runs) {
      const auto& c = r.timing.counters;
      const double f = static_cast<double>(c.flops);
      s << to_string(r.bp) << ',' << r.degree << ',' << to_string(r.variant) << ',' << r.n_el << ','
        << cfg.threads << ',' << cfg.repeats << ',' << fmt(r.timing.median) << ','
        << fmt(r.timing.mean) << ',' << c.flops << ',' << fmt(f / r.timing.median) << ','
        << fmt(f / r.timing.mean) << ',' << c.global_read_bytes << ',' << c.global_write_bytes << ','
        << c.scratch_read_bytes << ',' << c.scratch_write_bytes << ','
        << fmt(r.model_read_bytes + r.model_write_bytes) << ','
        << (bandwidth ? fmt(*bandwidth) : "") << ',' << (r.r_global ? fmt(*r.r_global) : "") << ','
        << (r.r_shared ? fmt(*r.r_shared) : "") << ',' << (r.verified ? "pass" : "fail") << '\n';
    }
    text = s.str();
  } else {
    json report;
    report["command"] = "bench";
    report["machine"] = machine_descriptor();
    report["config"] = config_json(cfg, mesh.n_el());
    report["bandwidth"] = {{"bytes_per_s", opt_json(bandwidth)},
                           {"source", bandwidth ? json(source) : json(nullptr)}};
    report["shared_bandwidth_bytes_per_s"] = shared_bandwidth_ansatz();
    json arr = json::array();
    for (const auto& r : runs) {
      const auto& c = r.timing.counters;
      const double f = static_cast<double>(c.flops);
      json j;
      j["bp"] = to_string(r.bp);
      j["degree"] = r.degree;
      j["variant"] = to_string(r.variant);
      j["n_el"] = r.n_el;
      j["wall_time_s"] = {{"median", r.timing.median}, {"mean", r.timing.mean}, {"trials", r.timing.trials}};
      j["flops"] = c.flops;
      j["achieved_flops_per_s"] = {{"median", f / r.timing.median}, {"mean", f / r.timing.mean}};
      j["counted_bytes"] = {{"global_read", c.global_read_bytes},
                            {"global_write", c.global_write_bytes},
                            {"scratch_read", c.scratch_read_bytes},
                            {"scratch_write", c.scratch_write_bytes},
                            {"interp_read", c.interp_read_bytes}};
      j["syncs"] = c.syncs;
      j["model"] = {{"flops", r.model_flops},
                    {"read_bytes", r.model_read_bytes},
                    {"write_bytes", r.model_write_bytes}};
      j["r_global"] = opt_json(r.r_global);
      j["r_shared"] = opt_json(r.r_shared);
      j["verification"] = r.verified ? "pass" : "fail";
      arr.push_back(j);
    }
    report["runs"] = arr;
    text = report.dump(2);
  }
  emit(cfg, text, out);
  const bool ok = std::all_of(runs.begin(), runs.end(), [](const BenchRun& r) { return r.verified; });
  return ok ? kOk : kVerificationFailed;
}

// --------------------------------------------------------------- roofline

std::string series_csv(const RooflineSeries& s, const std::string& source) {
  std::ostringstream o;
  const bool shared = s.shared_bandwidth.has_value();
  o << "# bp=" << to_string(s.bp) << '\n'
    << "# variant=" << to_string(s.variant) << '\n'
    << "# n_el=" << s.n_el << '\n'
    << "# B_gl=" << fmt(s.bandwidth) << " bytes/s (" << source << ")\n";
  if (shared) o << "# B_sh=" << fmt(*s.shared_bandwidth) << " bytes/s\n";
  o << (shared ? "N,F,bytes,R_global,R_shared,achieved\n" : "N,F,bytes,R_global,achieved\n");
  for (const auto& p : s.points) {
    o << p.degree << ',' << fmt(p.flops) << ',' << fmt(p.bytes) << ',' << fmt(p.r_global) << ',';
    if (shared) o << fmt(*p.r_shared) << ',';
    o << (p.achieved ? fmt(*p.achieved) : "") << '\n';
  }
  return o.str();
}

json series_json(const RooflineSeries& s, const std::string& source) {
  json j;
  j["bp"] = to_string(s.bp);
  j["variant"] = to_string(s.variant);
  j["n_el"] = s.n_el;
  j["B_gl"] = s.bandwidth;
  j["B_gl_source"] = source;
  j["B_sh"] = opt_json(s.shared_bandwidth);
  json pts = json::array();
  for (const auto& p : s.points) {
    json q;
    q["N"] = p.degree;
    q["F"] = p.flops;
    q["bytes"] = p.bytes;
    q["R_global"] = p.r_global;
    if (s.shared_bandwidth) q["R_shared"] = opt_json(p.r_shared);
    q["achieved"] = opt_json(p.achieved);
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

int cmd_roofline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string source;
  const auto bandwidth = resolve_bandwidth(cfg, err, source);
  if (!bandwidth) throw UsageError("roofline needs --bandwidth GBps or --measure");
  const Variant v = cfg.variant.value_or(Variant::Fused);
  const auto n_el = static_cast<std::size_t>(cfg.elements_per_side) * cfg.elements_per_side *
                    cfg.elements_per_side;
  std::optional<HexMesh> mesh;
  if (cfg.achieved) mesh = build_cube_mesh(cfg.elements_per_side, kExtent);

  std::vector<RooflineSeries> all;
  for (auto bp : cfg.bps) {
    auto s = roofline_series(bp, v, cfg.degrees.min, cfg.degrees.max, n_el, *bandwidth);
    if (cfg.achieved)
      for (auto& p : s.points) {
        const auto r = bench_one(cfg, *mesh, bp, p.degree, v, bandwidth);
        p.achieved = static_cast<double>(r.timing.counters.flops) / r.timing.median;
      }
    all.push_back(std::move(s));
  }

  const bool csv = cfg.format == "csv";
  if (cfg.out.empty()) {
    if (csv) {
      for (std::size_t i = 0; i < all.size(); ++i) out << (i ? "\n" : "") << series_csv(all[i], source);
    } else {
      json arr = json::array();
      for (const auto& s : all) arr.push_back(series_json(s, source));
      out << json{{"command", "roofline"}, {"series", arr}}.dump(2) << '\n';
    }
    return kOk;
  }
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create directory " + dir.string() + ": " + ec.message());
  for (const auto& s : all) {
    const auto path = dir / ("roofline_bp" + std::string(to_string(s.bp)) + (csv ? ".csv" : ".json"));
    write_text(path, csv ? series_csv(s, source) : series_json(s, source).dump(2) + "\n");
    out << "wrote " << path.string() << '\n';
  }
  return kOk;
}

// -------------------------------------------------------------- calibrate

int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto cal = measure_stream_bandwidth(cfg.calibration_bytes, cfg.repeats, cfg.threads);
  json j;
  j["command"] = "calibrate";
  j["machine"] = machine_descriptor();
  j["bytes"] = cal.bytes;
  j["threads"] = cal.threads;
  j["warmup_seconds"] = cal.warmup_seconds;
  j["trial_seconds"] = cal.trial_seconds;
  j["mean_bandwidth_bytes_per_s"] = cal.mean_bandwidth;
  j["theoretical_peak_bytes_per_s"] = cal.theoretical_peak;
  emit(cfg, j.dump(2), out);
  return kOk;
}

// ------------------------------------------------------------ arg parsing

struct RawArgs {
  std::string bp = "all";
  std::string degrees;
  int elements = 0;
  std::string mesh;
  std::string variant;
  double lambda = 1.0;
  int repeats = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  double bandwidth_gbps = 0.0;
  bool measure = false;
  bool achieved = false;
  std::size_t mib = 128;
};

void add_operator_options(CLI::App* sc, RawArgs& a) {
  sc->add_option("--bp", a.bp, "benchmark: 1.0, 3.5, 3.0 or all")
      ->check(CLI::IsMember({"1.0", "3.5", "3.0", "all"}));
  sc->add_option("--degrees", a.degrees, "polynomial degrees A..B (1..15)");
  auto* el = sc->add_option("--elements", a.elements, "elements per side");
  auto* mesh = sc->add_option("--mesh", a.mesh, "mesh preset: small (8^3) or large (16^3)")
                   ->check(CLI::IsMember({"small", "large"}));
  el->excludes(mesh);
  sc->add_option("--variant", a.variant, "baseline, fused or symfused")
      ->check(CLI::IsMember({"baseline", "fused", "symfused"}));
  sc->add_option("--lambda", a.lambda, "screening parameter for BP3.5/BP3.0");
  sc->add_option("--repeats", a.repeats, "timed applications");
  sc->add_option("--threads", a.threads, "element-parallel threads");
  sc->add_option("--seed", a.seed, "seed for meshes and random vectors");
  sc->add_option("--out", a.out, "output file (directory for roofline)");
  sc->add_option("--format", a.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_bandwidth_options(CLI::App* sc, RawArgs& a) {
  auto* bw = sc->add_option("--bandwidth", a.bandwidth_gbps, "global bandwidth in GB/s");
  auto* m = sc->add_flag("--measure", a.measure, "measure copy bandwidth");
  bw->excludes(m);
}

bool given(const CLI::App& sc, const std::string& name) {
  const auto* o = sc.get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

RunConfig build_config(const std::string& command, const CLI::App& sc, const RawArgs& a) {
  RunConfig cfg;
  if (a.bp == "all")
    cfg.bps.assign(std::begin(kAllBenchmarks), std::end(kAllBenchmarks));
  else
    cfg.bps.push_back(*parse_benchmark(a.bp));

  const char* default_degrees = command == "verify" ? "1..4" : command == "bench" ? "1..8" : "1..15";
  cfg.degrees = parse_degree_range(a.degrees.empty() ? default_degrees : a.degrees);

  cfg.elements_per_side = command == "verify" ? 2 : 8;
  if (given(sc, "--elements")) {
    if (a.elements < 1) throw UsageError("--elements must be >= 1");
    cfg.elements_per_side = a.elements;
  }
  if (a.mesh == "small") cfg.elements_per_side = 8;
  if (a.mesh == "large") cfg.elements_per_side = 16;

  if (!a.variant.empty()) cfg.variant = parse_variant(a.variant);
  if (cfg.variant)
    for (auto bp : cfg.bps)
      if (!variant_supported(bp, *cfg.variant))
        throw UnsupportedVariant("--variant " + a.variant + " is not supported for bp " +
                                 std::string(to_string(bp)));

  if (!(a.lambda >= 0.0) || !std::isfinite(a.lambda)) throw UsageError("--lambda must be >= 0");
  cfg.lambda = a.lambda;

  cfg.repeats = command == "calibrate" ? 10 : 5;
  if (given(sc, "--repeats")) {
    if (a.repeats < 1) throw UsageError("--repeats must be >= 1");
    cfg.repeats = a.repeats;
  }
  if (command == "calibrate" && cfg.repeats < 3) throw UsageError("--repeats must be >= 3 for calibrate");
  if (a.threads < 1) throw UsageError("--threads must be >= 1");
  cfg.threads = a.threads;
  cfg.seed = a.seed;
  cfg.out = a.out;
  cfg.format = a.format.empty() ? (command == "roofline" ? "csv" : "json") : a.format;

  if (given(sc, "--bandwidth")) {
    if (!(a.bandwidth_gbps > 0.0) || !std::isfinite(a.bandwidth_gbps))
      throw UsageError("--bandwidth must be positive");
    cfg.bandwidth = a.bandwidth_gbps * 1e9;
  }
  cfg.measure = a.measure;
  cfg.achieved = a.achieved;
  if (a.mib < 1) throw UsageError("--mib must be >= 1");
  cfg.calibration_bytes = a.mib << 20;
  return cfg;
}

}  // namespace

DegreeRange parse_degree_range(std::string_view text) {
  const auto fail = [&] {
    return UsageError("--degrees: expected A..B with " + std::to_string(kMinDegree) +
                      " <= A <= B <= " + std::to_string(kMaxDegree) + ", got '" +
                      std::string(text) + "'");
  };
  DegreeRange r;
  bool ok = false;
  const auto sep = text.find("..");
  if (sep == std::string_view::npos) {
    r.min = r.max = parse_int(text, ok);
    if (!ok) throw fail();
  } else {
    bool ok2 = false;
    r.min = parse_int(text.substr(0, sep), ok);
    r.max = parse_int(text.substr(sep + 2), ok2);
    if (!ok || !ok2) throw fail();
  }
  if (r.min < kMinDegree || r.max > kMaxDegree || r.min > r.max) throw fail();
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix-free high-order operator benchmarks", "hofem_bench"};
  app.require_subcommand(1);
  RawArgs a;

  auto* verify = app.add_subcommand("verify", "oracle-equivalence and invariant suites");
  add_operator_options(verify, a);

  auto* bench = app.add_subcommand("bench", "timed operator applications with counters");
  add_operator_options(bench, a);
  add_bandwidth_options(bench, a);

  auto* roofline = app.add_subcommand("roofline", "roofline model series");
  add_operator_options(roofline, a);
  add_bandwidth_options(roofline, a);
  roofline->add_flag("--achieved", a.achieved, "time the operator and fill the achieved column");

  auto* calibrate = app.add_subcommand("calibrate", "host copy bandwidth");
  calibrate->add_option("--repeats", a.repeats, "timed copies (>= 3)");
  calibrate->add_option("--threads", a.threads, "copy threads");
  calibrate->add_option("--mib", a.mib, "buffer size in MiB");
  calibrate->add_option("--out", a.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  const CLI::App* sc = app.get_subcommands().front();
  const std::string command = sc->get_name();
  try {
    const RunConfig cfg = build_config(command, *sc, a);
    if (command == "verify") return cmd_verify(cfg, out, err);
    if (command == "bench") return cmd_bench(cfg, out, err);
    if (command == "roofline") return cmd_roofline(cfg, out, err);
    return cmd_calibrate(cfg, out, err);
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return kResource;
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
    return kResource;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace hofem::cli
