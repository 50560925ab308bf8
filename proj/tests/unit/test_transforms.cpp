#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "specsense/transforms.hpp"

using namespace specsense;
using namespace specsense::transforms;

namespace {

IqVector random_capture(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  IqVector r;
  r.samples.resize(n);
  for (auto& s : r.samples) s = {static_cast<float>(g(rng)), static_cast<float>(g(rng))};
  return r;
}

double rms(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("DFT matches the direct sum") {
  for (std::size_t n : {1u, 2u, 8u, 12u, 128u, 100u}) {
    const auto x = random_capture(n, n).to_complex();
    const auto got = dft(x);
    const auto want = oracle::direct_dft(x);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("Parseval and inverse round trip") {
  const auto x = random_capture(128, 3).to_complex();
  const auto w = dft(x);
  double ex = 0, ew = 0;
  for (auto v : x) ex += std::norm(v);
  for (auto v : w) ew += std::norm(v);
  CHECK(ew / 128 == doctest::Approx(ex).epsilon(1e-12));
  const auto back = idft(w);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("IQ representation copies the rails") {
  const auto r = random_capture(16, 4);
  const auto f = to_iq(r);
  CHECK(f.length == 16);
  for (std::size_t n = 0; n < 16; ++n) {
    CHECK(f.at(0, n) == static_cast<double>(r.samples[n].real()));
    CHECK(f.at(1, n) == static_cast<double>(r.samples[n].imag()));
  }
}

TEST_CASE("amplitude / phase") {
  IqVector r;
  r.samples = {{3, 4}, {0, 0}, {-1, 0}, {0, -2}};
  const auto f = to_amp_phase(r);
  CHECK(f.at(0, 0) == doctest::Approx(5.0));
  CHECK(f.at(1, 0) == doctest::Approx(std::atan2(4.0, 3.0) / std::numbers::pi));
  CHECK(f.at(0, 1) == 0.0);
  CHECK(f.at(1, 1) == 0.0);
  CHECK(f.at(1, 2) == doctest::Approx(1.0));
  CHECK(f.at(1, 3) == doctest::Approx(-0.5));
  r.samples = {{-1.0f, -0.0f}};
  CHECK(to_amp_phase(r).at(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("FFT representation is the DFT split into rails") {
  const auto r = random_capture(32, 5);
  const auto want = oracle::direct_dft(r.to_complex());
  const auto f = to_fft_repr(r);
  for (std::size_t k = 0; k < 32; ++k) {
    CHECK(f.at(0, k) == doctest::Approx(want[k].real()).epsilon(1e-9));
    CHECK(f.at(1, k) == doctest::Approx(want[k].imag()).epsilon(1e-9));
  }
}

TEST_CASE("normalization") {
  const auto r = random_capture(128, 6, 3.0);
  for (auto repr : {Representation::kIq, Representation::kFft}) {
    const auto f = featurize(r, repr);
    CHECK(rms(f.data) == doctest::Approx(1.0).epsilon(1e-12));
    const auto again = normalize(f);
    for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(again.data[i] == doctest::Approx(f.data[i]).epsilon(1e-14));
  }
  SUBCASE("amplitude rail only for amp/phase") {
    const auto raw = to_amp_phase(r);
    const auto f = featurize(r, Representation::kAmpPhase);
    CHECK(rms(f.row(0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t n = 0; n < 128; ++n) CHECK(f.at(1, n) == raw.at(1, n));
  }
  SUBCASE("scale invariance") {
    IqVector big = r;
    for (auto& s : big.samples) s *= 8.0f;  // power of two keeps float exactness
    for (auto repr : {Representation::kIq, Representation::kAmpPhase, Representation::kFft}) {
      const auto a = featurize(r, repr), b = featurize(big, repr);
      for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-12));
    }
  }
  SUBCASE("zero capture passes through") {
    IqVector z;
    z.samples.assign(8, {0.0f, 0.0f});
    for (auto repr : {Representation::kIq, Representation::kAmpPhase, Representation::kFft})
      for (double v : featurize(z, repr).data) CHECK(v == 0.0);
  }
}

}  // TEST_SUITE
