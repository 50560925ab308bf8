// Emulated 2.4 GHz ISM technologies as seen through a 10 MS/s window.
//
// These are bandwidth/modulation/channelization-faithful stand-ins, not
// standards-compliant PHYs: no preambles, headers, MAC timing or hopping.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "specsense/sigsynth.hpp"

namespace specsense::sigsynth {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<TechnologyInfo, 15> kClasses = {{
    {{Technology::kWifi, 0}, "WIFI_CH0", -1.5e6, 6.75e6},
    {{Technology::kWifi, 1}, "WIFI_CH1", 0.0, 6.75e6},
    {{Technology::kWifi, 2}, "WIFI_CH2", +1.5e6, 6.75e6},
    {{Technology::kZigbee, 0}, "ZIGBEE_CH0", -2.5e6, 2e6},
    {{Technology::kZigbee, 1}, "ZIGBEE_CH1", 0.0, 2e6},
    {{Technology::kZigbee, 2}, "ZIGBEE_CH2", +2.5e6, 2e6},
    {{Technology::kBluetooth, 0}, "BT_CH0", -4e6, 1e6},
    {{Technology::kBluetooth, 1}, "BT_CH1", -3e6, 1e6},
    {{Technology::kBluetooth, 2}, "BT_CH2", -2e6, 1e6},
    {{Technology::kBluetooth, 3}, "BT_CH3", -1e6, 1e6},
    {{Technology::kBluetooth, 4}, "BT_CH4", 0.0, 1e6},
    {{Technology::kBluetooth, 5}, "BT_CH5", +1e6, 1e6},
    {{Technology::kBluetooth, 6}, "BT_CH6", +2e6, 1e6},
    {{Technology::kBluetooth, 7}, "BT_CH7", +3e6, 1e6},
    {{Technology::kBluetooth, 8}, "BT_CH8", +4e6, 1e6},
}};

// Bluetooth basic rate: 1 Msym/s GFSK, h = 0.32, BT = 0.5.
constexpr int kBtSps = 10;
constexpr double kBtModIndex = 0.32;
constexpr double kBtBt = 0.5;

// 802.15.4: 2 Mchip/s, 5 samples per chip at 10 MS/s.
constexpr int kZigbeeSamplesPerChip = 5;
constexpr std::array<std::uint8_t, 32> kZigbeeBaseChips = {
    1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1, 0};

// 802.11b style Barker spreading, chip rate scaled to 5 Mchip/s.
constexpr std::array<int, 11> kBarker11 = {+1, -1, +1, +1, -1, +1, +1, +1, -1, -1, -1};
constexpr int kWifiSamplesPerChip = 2;

// Chips for one 4-bit 802.15.4 data symbol: symbols 0-7 are 4-chip cyclic
// shifts of the base sequence, 8-15 repeat them with odd chips inverted.
std::array<std::uint8_t, 32> zigbee_chips(unsigned symbol) {
  std::array<std::uint8_t, 32> out{};
  const unsigned shift = 4 * (symbol & 7u);
  for (unsigned i = 0; i < 32; ++i) {
    std::uint8_t c = kZigbeeBaseChips[(i + 32 - shift) % 32];
    if (symbol >= 8 && (i % 2 == 1)) c ^= 1u;
    out[i] = c;
  }
  return out;
}

ComplexVector bluetooth(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<std::uint8_t> bits(n / kBtSps + 2);
  for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
  return modulate_fsk(bits, Modulation::kGfsk, kBtSps, kBtModIndex, kBtBt).samples;
}

ComplexVector zigbee(std::size_t n, Rng& rng) {
  const std::size_t chips_needed = n / kZigbeeSamplesPerChip + 4;
  std::vector<std::uint8_t> chips;
  std::uniform_int_distribution<unsigned> nibble(0, 15);
  while (chips.size() < chips_needed) {
    const auto seq = zigbee_chips(nibble(rng));
    chips.insert(chips.end(), seq.begin(), seq.end());
  }
  // Even chips on I, odd chips on Q delayed by one chip; half-sine pulses two
  // chips long.
  const std::size_t pulse_len = 2 * kZigbeeSamplesPerChip;
  ComplexVector out(chips.size() * kZigbeeSamplesPerChip + pulse_len, Complex(0.0, 0.0));
  for (std::size_t c = 0; c < chips.size(); ++c) {
    const double level = chips[c] ? 1.0 : -1.0;
    const std::size_t start = c * kZigbeeSamplesPerChip;
    for (std::size_t t = 0; t < pulse_len; ++t) {
      const double p = level * std::sin(kPi * (static_cast<double>(t) + 0.5) / static_cast<double>(pulse_len));
      if (c % 2 == 0) out[start + t] += Complex(p, 0.0);
      else out[start + t] += Complex(0.0, p);
    }
  }
  return out;
}

ComplexVector wifi(std::size_t n, Rng& rng) {
  const std::size_t symbols = n / (kBarker11.size() * kWifiSamplesPerChip) + 2;
  std::uniform_int_distribution<int> dibit(0, 3);
  std::vector<Complex> chips;
  chips.reserve(symbols * kBarker11.size());
  double phase = 0.0;
  for (std::size_t s = 0; s < symbols; ++s) {
    phase += dibit(rng) * kPi / 2.0;  // DQPSK
    const Complex sym = std::polar(1.0, phase);
    for (int b : kBarker11) chips.push_back(sym * static_cast<double>(b));
  }
  return pulse_shape(chips, kWifiSamplesPerChip, kDefaultRolloff, kDefaultFilterSpan).samples;
}

}  // namespace

std::span<const TechnologyInfo> technology_classes() noexcept { return kClasses; }

const TechnologyInfo& technology_info(TechnologyClass cls) {
  for (const auto& info : kClasses)
    if (info.cls == cls) return info;
  fail(ErrorCode::kInvalidArgument,
       "unknown technology class (channel index " + std::to_string(cls.channel_index) + ")");
}

BasebandSignal synthesize_technology(TechnologyClass cls, std::size_t duration_samples, std::uint64_t seed) {
  const TechnologyInfo& info = technology_info(cls);
  Rng rng(seed);
  // Extra lead-in so captures start at a random point of the symbol grid.
  constexpr std::size_t kLeadIn = 64;
  const std::size_t total = duration_samples + kLeadIn;
  ComplexVector raw;
  switch (cls.tech) {
    case Technology::kBluetooth: raw = bluetooth(total, rng); break;
    case Technology::kZigbee: raw = zigbee(total, rng); break;
    case Technology::kWifi: raw = wifi(total, rng); break;
  }
  std::uniform_int_distribution<std::size_t> skip(0, kLeadIn - 1);
  const std::size_t start = skip(rng);
  BasebandSignal out;
  out.sample_rate = kTechnologySampleRate;
  out.samples.assign(raw.begin() + static_cast<long>(start),
                     raw.begin() + static_cast<long>(start + duration_samples));
  // Unit mean power before the channel.
  double power = 0.0;
  for (const Complex& v : out.samples) power += std::norm(v);
  power /= static_cast<double>(std::max<std::size_t>(1, out.samples.size()));
  if (power > 0.0)
    for (Complex& v : out.samples) v /= std::sqrt(power);
  frequency_shift(out.samples, info.offset_hz, out.sample_rate);
  switch (cls.tech) {
    case Technology::kBluetooth: out.sps = kBtSps; break;
    case Technology::kZigbee: out.sps = kZigbeeSamplesPerChip; break;
    case Technology::kWifi: out.sps = kWifiSamplesPerChip; break;
  }
  return out;
}

}  // namespace specsense::sigsynth
