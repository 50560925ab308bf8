#pragma once

// Receiver-side impairment chain: multipath fading, carrier offset, phase
// noise, sample-clock drift and AWGN.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "specsense/common.hpp"

namespace specsense::channel {

struct Tap {
  Complex gain{1.0, 0.0};
  double delay = 0.0;  // samples; fractional delays use linear interpolation
};

enum class Profile : std::uint8_t {
  kRich,  // fading + CFO + phase noise + drift + AWGN
  kFlat,  // single complex tap + AWGN
};

struct ChannelParams {
  double snr_db = 0.0;
  std::vector<Tap> taps{Tap{}};
  double cfo_hz = 0.0;
  double phase_noise_std = 0.0;  // rad per sample (Wiener step)
  double clock_skew_ppm = 0.0;
  Profile profile = Profile::kRich;
  double sample_rate = 1e6;
};

/// SNR sentinel that disables noise.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

double mean_power(std::span<const Complex> x);

/// y[n] = sum_i a_i x[n - tau_i]; samples before the start are zero.
ComplexVector apply_fading(std::span<const Complex> x, std::span<const Tap> taps);

ComplexVector apply_cfo(std::span<const Complex> x, double cfo_hz, double sample_rate);

/// Zero-start Wiener walk: theta[0] = 0, theta[n] = theta[n-1] + N(0, std^2).
std::vector<double> wiener_phase(std::size_t n, double step_std, std::uint64_t seed);

ComplexVector apply_phase_noise(std::span<const Complex> x, double step_std, std::uint64_t seed);

/// Resamples at t_n = offset + n (1 + skew 1e-6) by linear interpolation,
/// holding the last sample past the end.
ComplexVector apply_timing_drift(std::span<const Complex> x, double skew_ppm, double initial_offset);

/// As above with the initial fractional offset drawn uniformly from [0, 1).
ComplexVector apply_timing_drift(std::span<const Complex> x, double skew_ppm, std::uint64_t seed);

/// Adds circular complex Gaussian noise rescaled so the measured noise power
/// equals mean_power(x) 10^(-snr/10) exactly. snr_db == kNoNoise is identity.
ComplexVector apply_awgn(std::span<const Complex> x, double snr_db, std::uint64_t seed);

/// Every stage except AWGN, in pipeline order.
ComplexVector apply_impairments(std::span<const Complex> x, const ChannelParams& params, std::uint64_t seed);

/// RICH: fading -> CFO -> phase noise -> timing drift -> AWGN.
/// FLAT: first tap gain -> AWGN.
ComplexVector channel_pipeline(std::span<const Complex> x, const ChannelParams& params, std::uint64_t seed);

/// Random RICH draw: 1-4 Rayleigh paths with 0.5-per-tap exponential power
/// profile and delays within 3 samples, CFO within +-500 Hz, phase-noise step
/// up to 0.01 rad, clock skew within +-100 ppm.
ChannelParams draw_rich(double snr_db, double sample_rate, Rng& rng);

/// Random FLAT draw: one unit-mean-power Rayleigh tap.
ChannelParams draw_flat(double snr_db, double sample_rate, Rng& rng);

}  // namespace specsense::channel
