#include "specsense/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace specsense {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kLabelOutOfRange: return "label out of range";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::string_view to_string(Task task) noexcept {
  return task == Task::kModulation ? "modulation" : "interference";
}

std::string_view to_string(Representation repr) noexcept {
  switch (repr) {
    case Representation::kIq: return "iq";
    case Representation::kAmpPhase: return "ap";
    case Representation::kFft: return "fft";
  }
  return "?";
}

ComplexVector IqVector::to_complex() const {
  ComplexVector out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [](std::complex<float> s) { return Complex(s.real(), s.imag()); });
  return out;
}

IqVector IqVector::from_complex(const ComplexVector& values) {
  IqVector out;
  out.samples.resize(values.size());
  std::transform(values.begin(), values.end(), out.samples.begin(), [](Complex v) {
    return std::complex<float>(static_cast<float>(v.real()), static_cast<float>(v.imag()));
  });
  return out;
}

namespace {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  std::uint64_t h = splitmix_finalize(master + kGolden);
  h = splitmix_finalize(h ^ (stream + kGolden * 2));
  return splitmix_finalize(h ^ (index + kGolden * 3));
}

SplitMix64::result_type SplitMix64::operator()() noexcept {
  state_ += kGolden;
  return splitmix_finalize(state_);
}

std::size_t worker_count() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPECSENSE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) hw = std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t max_workers) {
  if (n == 0) return;
  std::size_t workers = worker_count();
  if (max_workers > 0) workers = std::min(workers, max_workers);
  workers = std::min(workers, n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace specsense
