#include "specsense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace specsense::channel {

namespace {

constexpr double kPi = std::numbers::pi;

// Stage seeds are derived from the pipeline seed so each stage draws from an
// independent stream.
enum Stage : std::uint64_t { kPhaseNoiseStage = 1, kDriftStage = 2, kNoiseStage = 3 };

Complex interpolate(std::span<const Complex> x, double t) {
  if (t < 0.0) {
    // Linear ramp from the implicit zero sample at t = -1.
    return t <= -1.0 ? Complex(0.0, 0.0) : x[0] * (1.0 + t);
  }
  const auto last = static_cast<double>(x.size() - 1);
  if (t >= last) return x.back();
  const auto i = static_cast<std::size_t>(t);
  const double frac = t - static_cast<double>(i);
  return x[i] + (x[i + 1] - x[i]) * frac;
}

}  // namespace

double mean_power(std::span<const Complex> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const Complex& v : x) acc += std::norm(v);
  return acc / static_cast<double>(x.size());
}

ComplexVector apply_fading(std::span<const Complex> x, std::span<const Tap> taps) {
  require(!taps.empty(), ErrorCode::kInvalidArgument, "apply_fading: empty tap list");
  ComplexVector y(x.size(), Complex(0.0, 0.0));
  if (x.empty()) return y;
  for (const Tap& tap : taps) {
    require(tap.delay >= 0.0, ErrorCode::kInvalidArgument, "apply_fading: negative tap delay");
    const double whole = std::floor(tap.delay);
    if (tap.delay == whole) {
      const auto d = static_cast<std::size_t>(whole);
      for (std::size_t n = d; n < x.size(); ++n) y[n] += tap.gain * x[n - d];
    } else {
      for (std::size_t n = 0; n < x.size(); ++n)
        y[n] += tap.gain * interpolate(x, static_cast<double>(n) - tap.delay);
    }
  }
  return y;
}

ComplexVector apply_cfo(std::span<const Complex> x, double cfo_hz, double sample_rate) {
  ComplexVector y(x.begin(), x.end());
  if (cfo_hz == 0.0) return y;
  const double w = 2.0 * kPi * cfo_hz / sample_rate;
  for (std::size_t n = 0; n < y.size(); ++n)
    y[n] *= std::polar(1.0, std::remainder(w * static_cast<double>(n), 2.0 * kPi));
  return y;
}

std::vector<double> wiener_phase(std::size_t n, double step_std, std::uint64_t seed) {
  require(step_std >= 0.0, ErrorCode::kInvalidArgument, "phase noise std must be >= 0");
  std::vector<double> theta(n, 0.0);
  if (step_std == 0.0 || n == 0) return theta;
  Rng rng(seed);
  std::normal_distribution<double> step(0.0, step_std);
  for (std::size_t i = 1; i < n; ++i) theta[i] = theta[i - 1] + step(rng);
  return theta;
}

ComplexVector apply_phase_noise(std::span<const Complex> x, double step_std, std::uint64_t seed) {
  ComplexVector y(x.begin(), x.end());
  if (step_std == 0.0) return y;
  const std::vector<double> theta = wiener_phase(x.size(), step_std, seed);
  for (std::size_t n = 0; n < y.size(); ++n) y[n] *= std::polar(1.0, theta[n]);
  return y;
}

ComplexVector apply_timing_drift(std::span<const Complex> x, double skew_ppm, double initial_offset) {
  require(std::abs(skew_ppm) <= 200.0, ErrorCode::kInvalidArgument,
          "apply_timing_drift: |skew| must be <= 200 ppm");
  ComplexVector y(x.size());
  if (x.empty()) return y;
  const double rate = 1.0 + skew_ppm * 1e-6;
  for (std::size_t n = 0; n < x.size(); ++n) y[n] = interpolate(x, initial_offset + static_cast<double>(n) * rate);
  return y;
}

ComplexVector apply_timing_drift(std::span<const Complex> x, double skew_ppm, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> offset(0.0, 1.0);
  return apply_timing_drift(x, skew_ppm, offset(rng));
}

ComplexVector apply_awgn(std::span<const Complex> x, double snr_db, std::uint64_t seed) {
  ComplexVector y(x.begin(), x.end());
  if (std::isinf(snr_db) && snr_db > 0.0) return y;
  const double signal_power = mean_power(x);
  require(signal_power > 0.0, ErrorCode::kInvalidArgument, "apply_awgn: input has zero power");
  const double target = signal_power * std::pow(10.0, -snr_db / 10.0);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector noise(x.size());
  for (auto& v : noise) v = Complex(gauss(rng), gauss(rng));
  const double scale = std::sqrt(target / mean_power(noise));
  for (std::size_t n = 0; n < y.size(); ++n) y[n] += noise[n] * scale;
  return y;
}

ComplexVector apply_impairments(std::span<const Complex> x, const ChannelParams& params, std::uint64_t seed) {
  if (params.profile == Profile::kFlat) {
    require(!params.taps.empty(), ErrorCode::kInvalidArgument, "flat channel needs one tap");
    ComplexVector y(x.begin(), x.end());
    for (auto& v : y) v *= params.taps.front().gain;
    return y;
  }
  require(std::abs(params.cfo_hz) < params.sample_rate / 2.0, ErrorCode::kInvalidArgument,
          "CFO must be below half the sample rate");
  ComplexVector y = apply_fading(x, params.taps);
  y = apply_cfo(y, params.cfo_hz, params.sample_rate);
  y = apply_phase_noise(y, params.phase_noise_std, mix_seed(seed, kPhaseNoiseStage));
  y = apply_timing_drift(y, params.clock_skew_ppm, mix_seed(seed, kDriftStage));
  return y;
}

ComplexVector channel_pipeline(std::span<const Complex> x, const ChannelParams& params, std::uint64_t seed) {
  const ComplexVector y = apply_impairments(x, params, seed);
  return apply_awgn(y, params.snr_db, mix_seed(seed, kNoiseStage));
}

ChannelParams draw_rich(double snr_db, double sample_rate, Rng& rng) {
  ChannelParams p;
  p.profile = Profile::kRich;
  p.snr_db = snr_db;
  p.sample_rate = sample_rate;
  std::uniform_int_distribution<int> path_count(1, 4);
  std::uniform_real_distribution<double> delay(0.0, 3.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int paths = path_count(rng);
  std::vector<double> delays{0.0};
  for (int i = 1; i < paths; ++i) delays.push_back(delay(rng));
  std::sort(delays.begin(), delays.end());
  // Exponential power-delay profile (0.5 per tap), normalized to unit total.
  double total = 0.0;
  for (int i = 0; i < paths; ++i) total += std::pow(0.5, i);
  p.taps.clear();
  for (int i = 0; i < paths; ++i) {
    const double sigma = std::sqrt(std::pow(0.5, i) / total / 2.0);
    p.taps.push_back(Tap{Complex(gauss(rng), gauss(rng)) * sigma, delays[static_cast<std::size_t>(i)]});
  }
  p.cfo_hz = std::uniform_real_distribution<double>(-500.0, 500.0)(rng);
  p.phase_noise_std = std::uniform_real_distribution<double>(0.0, 0.01)(rng);
  p.clock_skew_ppm = std::uniform_real_distribution<double>(-100.0, 100.0)(rng);
  return p;
}

ChannelParams draw_flat(double snr_db, double sample_rate, Rng& rng) {
  ChannelParams p;
  p.profile = Profile::kFlat;
  p.snr_db = snr_db;
  p.sample_rate = sample_rate;
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  p.taps = {Tap{Complex(gauss(rng), gauss(rng)), 0.0}};
  return p;
}

}  // namespace specsense::channel
