#pragma once

// Shared vocabulary types, error handling, seeding and worker parallelism.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specsense {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Error categories surfaced by the library. The numeric values are stable
/// and mirrored by the C API status codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kUnsupported = 2,
  kIo = 3,
  kBadMagic = 4,
  kVersionMismatch = 5,
  kTruncated = 6,
  kLabelOutOfRange = 7,
  kShapeMismatch = 8,
  kNonFinite = 9,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

enum class Task : std::uint8_t { kModulation = 0, kInterference = 1 };
enum class Representation : std::uint8_t { kIq = 0, kAmpPhase = 1, kFft = 2 };

std::string_view to_string(Task task) noexcept;
std::string_view to_string(Representation repr) noexcept;

/// One N-sample receiver capture. Stored in binary32 so that container
/// persistence is bit-exact.
struct IqVector {
  std::vector<std::complex<float>> samples;

  std::size_t size() const noexcept { return samples.size(); }
  ComplexVector to_complex() const;
  static IqVector from_complex(const ComplexVector& values);
};

// ---------------------------------------------------------------------------
// Seeding. Every random draw in the library is keyed by a 64-bit seed derived
// from a master seed with a counter, so results never depend on the order in
// which work items run.

/// SplitMix64 finalizer over (master, stream, index).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept;

/// Counter-based generator (SplitMix64). Cheap to construct, used where a
/// fresh stream per work item is needed (dropout masks).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Parallelism. SPECSENSE_THREADS caps the number of workers.

std::size_t worker_count();

/// Runs body(begin, end) over a static partition of [0, n). Partitioning only
/// affects scheduling; callers keep results order-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t max_workers = 0);

}  // namespace specsense
