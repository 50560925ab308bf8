#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "specsense/channel.hpp"

using namespace specsense;
using namespace specsense::channel;

namespace {

ComplexVector random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

ComplexVector tone(std::size_t n, double cycles_per_sample) {
  ComplexVector x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::polar(1.0, 2 * std::numbers::pi * cycles_per_sample * static_cast<double>(i));
  return x;
}

double max_diff(const ComplexVector& a, const ComplexVector& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("fading") {
  const auto x = random_signal(64, 1);
  SUBCASE("unit tap is identity") {
    const std::vector<Tap> taps{Tap{}};
    CHECK(max_diff(apply_fading(x, taps), x) == 0.0);
  }
  SUBCASE("half gain halves") {
    const std::vector<Tap> taps{Tap{{0.5, 0}, 0}};
    const auto y = apply_fading(x, taps);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - 0.5 * x[i]) < 1e-15);
  }
  SUBCASE("two taps match a direct convolution") {
    const std::vector<Tap> taps{Tap{{1, 0}, 0}, Tap{{0, 0.5}, 2}};
    const auto y = apply_fading(x, taps);
    for (std::size_t n = 0; n < x.size(); ++n) {
      Complex want = x[n];
      if (n >= 2) want += Complex(0, 0.5) * x[n - 2];
      CHECK(std::abs(y[n] - want) < 1e-12);
    }
  }
  SUBCASE("linear in the input") {
    const auto z = random_signal(64, 2);
    const std::vector<Tap> taps{Tap{{0.3, -0.2}, 0}, Tap{{0.1, 0.4}, 1.7}};
    ComplexVector sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] = 2.0 * x[i] + z[i];
    const auto ys = apply_fading(sum, taps), yx = apply_fading(x, taps), yz = apply_fading(z, taps);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(ys[i] - (2.0 * yx[i] + yz[i])) < 1e-12);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(apply_fading(x, std::vector<Tap>{}), Error);
    CHECK_THROWS_AS(apply_fading(x, std::vector<Tap>{Tap{{1, 0}, -1}}), Error);
  }
}

TEST_CASE("carrier offset") {
  const auto x = random_signal(256, 3);
  CHECK(max_diff(apply_cfo(x, 0.0, 1e6), x) == 0.0);
  const auto y = apply_cfo(x, 12345.0, 1e6);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(std::abs(y[i]) - std::abs(x[i])) < 1e-12);
  // a tone at bin 10 moves to bin 14 for an offset of 4 bins
  const double fs = 1e6;
  const auto t = tone(256, 10.0 / 256);
  const auto shifted = apply_cfo(t, 4.0 * fs / 256, fs);
  CHECK(oracle::peak_frequency(shifted, fs) == doctest::Approx(14.0 * fs / 256));
}

TEST_CASE("phase noise") {
  const auto x = random_signal(32, 4);
  CHECK(max_diff(apply_phase_noise(x, 0.0, 9), x) == 0.0);
  const auto y = apply_phase_noise(x, 0.05, 9);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(std::abs(y[i]) - std::abs(x[i])) < 1e-12);

  // Var(theta[n]) = n sigma^2
  const double sigma = 0.01;
  const std::size_t trials = 1000, len = 101;
  std::vector<double> var(len, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto th = wiener_phase(len, sigma, 1000 + t);
    CHECK(th[0] == 0.0);
    for (std::size_t n = 0; n < len; ++n) var[n] += th[n] * th[n] / trials;
  }
  for (std::size_t n : {25u, 50u, 100u}) {
    const double want = static_cast<double>(n) * sigma * sigma;
    CHECK(std::abs(var[n] - want) / want <= 0.2);
  }
}

TEST_CASE("timing drift") {
  SUBCASE("zero skew and offset is identity") {
    const auto x = random_signal(40, 5);
    CHECK(max_diff(apply_timing_drift(x, 0.0, 0.0), x) == 0.0);
  }
  SUBCASE("a ramp is resampled exactly") {
    ComplexVector ramp(1000);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    const double skew = 100.0, off = 0.25;
    const auto y = apply_timing_drift(ramp, skew, off);
    for (std::size_t n = 0; n < 990; ++n) {
      const double t = off + static_cast<double>(n) * (1 + skew * 1e-6);
      CHECK(y[n].real() == doctest::Approx(t).epsilon(1e-12));
    }
  }
  SUBCASE("a constant stays constant") {
    const ComplexVector c(100, Complex(0.7, -0.1));
    const auto y = apply_timing_drift(c, -80.0, 0.5);
    for (const auto& v : y) CHECK(std::abs(v - c[0]) < 1e-12);
  }
  SUBCASE("skew bound") {
    const ComplexVector c(10, Complex(1, 0));
    CHECK_THROWS_AS(apply_timing_drift(c, 250.0, 0.0), Error);
  }
}

TEST_CASE("AWGN") {
  const auto x = random_signal(1024, 6);
  const double px = mean_power(x);
  CHECK(max_diff(apply_awgn(x, kNoNoise, 1), x) == 0.0);
  for (double snr : {-10.0, 0.0, 10.0}) {
    double total = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto y = apply_awgn(x, snr, s);
      ComplexVector noise(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) noise[i] = y[i] - x[i];
      const double pn = mean_power(noise);
      CHECK(std::abs(10 * std::log10(px / pn) - snr) <= 0.5);
      total += pn;
    }
    const double want = px * std::pow(10.0, -snr / 10);
    CHECK(std::abs(total / 100 - want) / want <= 0.02);
  }
  const ComplexVector zero(8, Complex(0, 0));
  CHECK_THROWS_AS(apply_awgn(zero, 0.0, 1), Error);

  SUBCASE("0 dB on 128 samples, different seeds") {
    const auto s = random_signal(128, 9);
    const double ps = mean_power(s);
    double total = 0;
    ComplexVector first;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto y = apply_awgn(s, 0.0, seed);
      ComplexVector n(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) n[i] = y[i] - s[i];
      if (seed == 0) first = n;
      if (seed == 1) CHECK(n != first);
      total += mean_power(n);
    }
    CHECK(std::abs(total / 100 / ps - 1.0) <= 0.02);
  }
}

TEST_CASE("random draws stay in range and the pipeline stays finite") {
  Rng rng(77);
  const auto x = random_signal(384, 7);
  for (int i = 0; i < 1000; ++i) {
    const auto p = draw_rich(0.0, 1e6, rng);
    REQUIRE(p.taps.size() >= 1);
    REQUIRE(p.taps.size() <= 4);
    CHECK(p.taps[0].delay == 0.0);
    for (const auto& t : p.taps) {
      CHECK(t.delay >= 0.0);
      CHECK(t.delay <= 3.0);
    }
    CHECK(std::abs(p.cfo_hz) <= 500.0);
    CHECK(p.phase_noise_std >= 0.0);
    CHECK(p.phase_noise_std <= 0.01);
    CHECK(std::abs(p.clock_skew_ppm) <= 100.0);
    const auto y = channel_pipeline(x, p, static_cast<std::uint64_t>(i));
    const double py = mean_power(y);
    CHECK(y.size() == x.size());
    CHECK(std::isfinite(py));
    CHECK(py > 0.0);
  }
  const auto f = draw_flat(5.0, 10e6, rng);
  CHECK(f.profile == Profile::kFlat);
  CHECK(f.taps.size() == 1);
}

TEST_CASE("pipeline is deterministic per seed") {
  Rng a(1), b(1);
  const auto pa = draw_rich(3.0, 1e6, a), pb = draw_rich(3.0, 1e6, b);
  const auto x = random_signal(128, 8);
  CHECK(channel_pipeline(x, pa, 5) == channel_pipeline(x, pb, 5));
  CHECK(channel_pipeline(x, pa, 5) != channel_pipeline(x, pa, 6));
}

}  // TEST_SUITE
