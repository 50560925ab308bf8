#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "specsense/sigsynth.hpp"
#include "specsense/transforms.hpp"

namespace specsense::sigsynth {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
  std::vector<std::uint8_t> bits(count);
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
  return bits;
}

// Gaussian frequency-pulse filter for GFSK, 4 symbols long, unit DC gain.
std::vector<double> gaussian_taps(int sps, double bt) {
  const int span = 4;
  const int len = span * sps + 1;
  const double center = (len - 1) / 2.0;
  const double alpha = std::sqrt(std::log(2.0) / 2.0) / bt;
  std::vector<double> taps(len);
  double sum = 0.0;
  for (int i = 0; i < len; ++i) {
    const double t = (i - center) / sps;  // in symbol periods
    taps[i] = std::exp(-(kPi * t / alpha) * (kPi * t / alpha));
    sum += taps[i];
  }
  for (double& v : taps) v /= sum;
  return taps;
}

}  // namespace

std::string_view name(Modulation m) noexcept {
  switch (m) {
    case Modulation::kBpsk: return "BPSK";
    case Modulation::kQpsk: return "QPSK";
    case Modulation::kPsk8: return "8PSK";
    case Modulation::kQam16: return "QAM16";
    case Modulation::kQam64: return "QAM64";
    case Modulation::kCpfsk: return "CPFSK";
    case Modulation::kGfsk: return "GFSK";
    case Modulation::kPam4: return "PAM4";
    case Modulation::kWbfm: return "WBFM";
    case Modulation::kAmDsb: return "AM-DSB";
    case Modulation::kAmSsb: return "AM-SSB";
  }
  return "?";
}

bool is_linear(Modulation m) noexcept { return !constellation(m).empty(); }

std::size_t bits_per_symbol(Modulation m) noexcept {
  const auto table = constellation(m);
  if (!table.empty()) return static_cast<std::size_t>(std::countr_zero(table.size()));
  if (m == Modulation::kCpfsk || m == Modulation::kGfsk) return 1;
  return 0;
}

SymbolStream map_bits_to_symbols(std::span<const std::uint8_t> bits, Modulation m) {
  require(is_linear(m), ErrorCode::kUnsupported,
          std::string("map_bits_to_symbols: ") + std::string(name(m)) + " is not a linear scheme");
  const std::size_t k = bits_per_symbol(m);
  require(bits.size() % k == 0, ErrorCode::kInvalidArgument,
          "map_bits_to_symbols: bit count " + std::to_string(bits.size()) +
              " is not a multiple of " + std::to_string(k));
  const auto table = constellation(m);
  SymbolStream out(bits.size() / k);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::size_t word = 0;
    for (std::size_t b = 0; b < k; ++b) word = (word << 1) | (bits[s * k + b] & 1u);
    out[s] = table[word];
  }
  return out;
}

std::vector<double> rrc_taps(int sps, double rolloff, int span) {
  require(sps >= 2, ErrorCode::kInvalidArgument, "rrc_taps: sps must be >= 2");
  require(span >= 4, ErrorCode::kInvalidArgument, "rrc_taps: span must be >= 4");
  require(rolloff >= 0.0 && rolloff <= 1.0, ErrorCode::kInvalidArgument,
          "rrc_taps: rolloff must be in [0, 1]");
  const int len = span * sps + 1;
  const double beta = rolloff;
  std::vector<double> h(len);
  for (int i = 0; i < len; ++i) {
    const double t = static_cast<double>(i - span * sps / 2) / sps;
    if (std::abs(t) < 1e-12) {
      h[i] = 1.0 - beta + 4.0 * beta / kPi;
    } else if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-9) {
      h[i] = beta / std::sqrt(2.0) *
             ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * beta)) +
              (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * beta)));
    } else {
      const double num = std::sin(kPi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
      const double den = kPi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
      h[i] = num / den;
    }
  }
  double energy = 0.0;
  for (double v : h) energy += v * v;
  const double scale = std::sqrt(static_cast<double>(sps) / energy);
  for (double& v : h) v *= scale;
  return h;
}

BasebandSignal pulse_shape(std::span<const Complex> symbols, int sps, double rolloff, int span) {
  require(sps >= 2, ErrorCode::kInvalidArgument, "pulse_shape: sps must be >= 2");
  const std::vector<double> h = rrc_taps(sps, rolloff, span);
  const long delay = static_cast<long>(h.size() - 1) / 2;
  const long n_out = static_cast<long>(symbols.size()) * sps;
  BasebandSignal out;
  out.sps = sps;
  out.samples.assign(static_cast<std::size_t>(n_out), Complex(0.0, 0.0));
  // out[n] = sum_k sym[k] h[n + delay - k sps]
  for (long k = 0; k < static_cast<long>(symbols.size()); ++k) {
    const Complex s = symbols[static_cast<std::size_t>(k)];
    if (s == Complex(0.0, 0.0)) continue;
    const long first = std::max(0L, k * sps - delay);
    const long last = std::min(n_out - 1, k * sps - delay + static_cast<long>(h.size()) - 1);
    for (long n = first; n <= last; ++n)
      out.samples[static_cast<std::size_t>(n)] += s * h[static_cast<std::size_t>(n + delay - k * sps)];
  }
  return out;
}

BasebandSignal modulate_fsk(std::span<const std::uint8_t> bits, Modulation scheme, int sps,
                            double mod_index, double bt) {
  require(scheme == Modulation::kCpfsk || scheme == Modulation::kGfsk, ErrorCode::kUnsupported,
          "modulate_fsk: scheme must be CPFSK or GFSK");
  require(sps >= 1, ErrorCode::kInvalidArgument, "modulate_fsk: sps must be >= 1");
  require(mod_index > 0.0, ErrorCode::kInvalidArgument, "modulate_fsk: mod_index must be > 0");
  require(scheme != Modulation::kGfsk || bt > 0.0, ErrorCode::kInvalidArgument,
          "modulate_fsk: bt must be > 0");

  const std::size_t n = bits.size() * static_cast<std::size_t>(sps);
  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = (bits[i / sps] & 1u) ? 1.0 : -1.0;

  if (scheme == Modulation::kGfsk) {
    const std::vector<double> g = gaussian_taps(sps, bt);
    const long half = static_cast<long>(g.size() - 1) / 2;
    std::vector<double> smoothed(n, 0.0);
    for (long i = 0; i < static_cast<long>(n); ++i) {
      double acc = 0.0;
      for (long t = 0; t < static_cast<long>(g.size()); ++t) {
        // Hold the edge symbols beyond the burst boundaries.
        const long src = std::clamp(i + half - t, 0L, static_cast<long>(n) - 1);
        acc += g[static_cast<std::size_t>(t)] * freq[static_cast<std::size_t>(src)];
      }
      smoothed[static_cast<std::size_t>(i)] = acc;
    }
    freq = std::move(smoothed);
  }

  BasebandSignal out;
  out.sps = sps;
  out.samples.resize(n);
  const double step = kPi * mod_index / sps;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phase += step * freq[i];
    phase = std::remainder(phase, 2.0 * kPi);
    out.samples[i] = std::polar(1.0, phase);
  }
  return out;
}

BasebandSignal modulate_analog(Modulation scheme, std::span<const double> message,
                               const AnalogParams& params) {
  double peak = 0.0;
  for (double v : message) peak = std::max(peak, std::abs(v));
  require(peak <= 1.0 + 1e-12, ErrorCode::kInvalidArgument,
          "modulate_analog: message peak exceeds 1 (normalize first)");
  BasebandSignal out;
  out.sample_rate = params.sample_rate;
  out.samples.resize(message.size());
  switch (scheme) {
    case Modulation::kAmDsb:
      for (std::size_t i = 0; i < message.size(); ++i) out.samples[i] = 1.0 + params.am_index * message[i];
      break;
    case Modulation::kAmSsb: {
      // Analytic signal: keep DC and Nyquist, double positive bins, drop negatives.
      ComplexVector m(message.begin(), message.end());
      ComplexVector w = transforms::dft(m);
      const std::size_t n = w.size();
      for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n) w[k] *= 2.0;
        else if (2 * k > n) w[k] = 0.0;
      }
      out.samples = transforms::idft(w);
      break;
    }
    case Modulation::kWbfm: {
      double phase = 0.0;
      const double step = 2.0 * kPi * params.fm_deviation_hz / params.sample_rate;
      for (std::size_t i = 0; i < message.size(); ++i) {
        phase = std::remainder(phase + step * message[i], 2.0 * kPi);
        out.samples[i] = std::polar(1.0, phase);
      }
      break;
    }
    default:
      fail(ErrorCode::kUnsupported, "modulate_analog: scheme must be WBFM, AM-DSB or AM-SSB");
  }
  return out;
}

std::vector<double> synthetic_message(std::size_t length, double sample_rate, Rng& rng) {
  std::vector<double> m(length, 0.0);
  if (length == 0) return m;
  std::uniform_int_distribution<int> tone_count(3, 5);
  std::uniform_real_distribution<double> freq(300.0, 5000.0);
  std::uniform_real_distribution<double> amp(0.3, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const int tones = tone_count(rng);
  for (int t = 0; t < tones; ++t) {
    const double f = freq(rng), a = amp(rng), p = phase(rng);
    for (std::size_t i = 0; i < length; ++i)
      m[i] += a * std::sin(2.0 * kPi * f * static_cast<double>(i) / sample_rate + p);
  }
  double peak = 0.0;
  for (double v : m) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : m) v /= peak;

  // Silence: total fraction in [0, 0.3), split into 1-3 gaps.
  std::uniform_real_distribution<double> fraction(0.0, 0.3);
  std::uniform_int_distribution<int> gap_count(1, 3);
  const auto silent = static_cast<std::size_t>(fraction(rng) * static_cast<double>(length));
  const int gaps = gap_count(rng);
  for (int g = 0; g < gaps && silent > 0; ++g) {
    const std::size_t len = silent / static_cast<std::size_t>(gaps);
    if (len == 0 || len >= length) continue;
    std::uniform_int_distribution<std::size_t> start(0, length - len);
    const std::size_t s = start(rng);
    std::fill(m.begin() + static_cast<long>(s), m.begin() + static_cast<long>(s + len), 0.0);
  }
  return m;
}

BasebandSignal synthesize_modulation(Modulation m, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kSamplesPerSymbolChoices.size() - 1);
  const int sps = kSamplesPerSymbolChoices[pick(rng)];
  const std::size_t symbols = (length + static_cast<std::size_t>(sps) - 1) / static_cast<std::size_t>(sps);
  BasebandSignal out;
  if (is_linear(m)) {
    const auto bits = random_bits(symbols * bits_per_symbol(m), rng);
    out = pulse_shape(map_bits_to_symbols(bits, m), sps, kDefaultRolloff, kDefaultFilterSpan);
  } else if (m == Modulation::kCpfsk || m == Modulation::kGfsk) {
    out = modulate_fsk(random_bits(symbols, rng), m, sps, kFskModIndex, kGfskBt);
  } else {
    // Power-of-two message keeps the SSB Hilbert construction on the fast path.
    const AnalogParams params;
    const std::size_t padded = std::bit_ceil(length);
    const auto message = synthetic_message(padded, params.sample_rate, rng);
    out = modulate_analog(m, message, params);
    out.sps = 1.0;
  }
  out.samples.resize(length);
  out.sample_rate = kModulationSampleRate;
  return out;
}

void frequency_shift(ComplexVector& x, double offset_hz, double sample_rate) {
  if (offset_hz == 0.0) return;
  const double w = 2.0 * kPi * offset_hz / sample_rate;
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] *= std::polar(1.0, std::remainder(w * static_cast<double>(n), 2.0 * kPi));
}

}  // namespace specsense::sigsynth
