#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hofem/operators.hpp"

namespace hofem::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kResource = 3 };

/// Malformed or contradictory command-line input. The message names the flag.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DegreeRange {
  int min = 1;
  int max = 1;
};

/// "A..B" or "A", with 1 <= A <= B <= 15.
DegreeRange parse_degree_range(std::string_view text);

struct RunConfig {
  std::vector<Benchmark> bps;
  DegreeRange degrees;
  int elements_per_side = 2;
  std::optional<Variant> variant;  // unset: every supported variant (verify) or fused
  double lambda = 1.0;
  int repeats = 5;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::optional<double> bandwidth;  // bytes/s, supplied or measured
  bool measure = false;
  bool achieved = false;  // roofline: time the operator and fill the achieved column
  std::size_t calibration_bytes = std::size_t{128} << 20;
};

/// Entry point of the command-line tool. Reports go to `out` (or to files
/// under --out), diagnostics to `err`. Returns one of ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hofem::cli
