#pragma once

// Clean complex-baseband waveform generators: linear digital schemes, CPM
// (CPFSK/GFSK), analog AM/FM, and emulated ISM-band technologies.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "specsense/common.hpp"

namespace specsense::sigsynth {

enum class Modulation : std::uint8_t {
  kBpsk,
  kQpsk,
  kPsk8,
  kQam16,
  kQam64,
  kCpfsk,
  kGfsk,
  kPam4,
  kWbfm,
  kAmDsb,
  kAmSsb,
};

inline constexpr std::array<Modulation, 11> kAllModulations = {
    Modulation::kBpsk, Modulation::kQpsk,  Modulation::kPsk8, Modulation::kQam16,
    Modulation::kQam64, Modulation::kCpfsk, Modulation::kGfsk, Modulation::kPam4,
    Modulation::kWbfm, Modulation::kAmDsb, Modulation::kAmSsb,
};

std::string_view name(Modulation m) noexcept;

/// True for the table-driven schemes (PSK, QAM, PAM).
bool is_linear(Modulation m) noexcept;

/// Bits per symbol of a linear scheme; 1 for CPFSK/GFSK; 0 for analog.
std::size_t bits_per_symbol(Modulation m) noexcept;

/// Gray-coded unit-energy constellation, indexed by the symbol's bit word
/// (first bit of the group is the most significant). Empty for non-linear
/// schemes. Tables live in constellations.cpp.
std::span<const Complex> constellation(Modulation m) noexcept;

using SymbolStream = std::vector<Complex>;

struct BasebandSignal {
  ComplexVector samples;
  double sample_rate = 1.0;
  double sps = 1.0;
};

SymbolStream map_bits_to_symbols(std::span<const std::uint8_t> bits, Modulation m);

/// Root-raised-cosine taps, span*sps+1 long, scaled so sum(h^2) == sps (unit
/// output power for unit-energy symbols).
std::vector<double> rrc_taps(int sps, double rolloff, int span);

/// RRC interpolation by sps; output has symbols.size()*sps samples with the
/// filter transient trimmed symmetrically.
BasebandSignal pulse_shape(std::span<const Complex> symbols, int sps, double rolloff = 0.35,
                           int span = 8);

/// Continuous-phase FSK. Bit 1 maps to +1 frequency, bit 0 to -1. GFSK
/// smooths the frequency pulse with a Gaussian filter of bandwidth-time bt.
BasebandSignal modulate_fsk(std::span<const std::uint8_t> bits, Modulation scheme, int sps,
                            double mod_index, double bt = 0.3);

struct AnalogParams {
  double sample_rate = 200e3;     // Hz
  double am_index = 0.8;          // AM-DSB modulation depth
  double fm_deviation_hz = 75e3;  // WBFM k_f
};

/// m must satisfy max|m| <= 1.
BasebandSignal modulate_analog(Modulation scheme, std::span<const double> message,
                               const AnalogParams& params = {});

/// Audio surrogate: 3-5 tones in 0.3-5 kHz, peak-normalized to 1, with
/// silence gaps covering 0-30% of the length (no single gap over 30%).
std::vector<double> synthetic_message(std::size_t length, double sample_rate, Rng& rng);

inline constexpr std::array<int, 5> kSamplesPerSymbolChoices = {8, 10, 12, 14, 16};
inline constexpr double kModulationSampleRate = 1e6;
inline constexpr double kDefaultRolloff = 0.35;
inline constexpr int kDefaultFilterSpan = 8;
inline constexpr double kFskModIndex = 0.5;
inline constexpr double kGfskBt = 0.3;

/// One random clean stream of `length` samples for a modulation class:
/// fresh payload bits (or message) and sps drawn from kSamplesPerSymbolChoices.
BasebandSignal synthesize_modulation(Modulation m, std::size_t length, std::uint64_t seed);

// ---------------------------------------------------------------------------
// ISM-band technologies observed through a 10 MS/s capture window.

enum class Technology : std::uint8_t { kWifi, kZigbee, kBluetooth };

struct TechnologyClass {
  Technology tech = Technology::kWifi;
  int channel_index = 0;

  friend bool operator==(const TechnologyClass&, const TechnologyClass&) = default;
};

struct TechnologyInfo {
  TechnologyClass cls;
  std::string_view name;
  double offset_hz;     // channel centre relative to the window centre
  double bandwidth_hz;  // nominal occupied bandwidth
};

inline constexpr double kTechnologySampleRate = 10e6;

/// The 15 (technology, channel) classes in label order.
std::span<const TechnologyInfo> technology_classes() noexcept;

const TechnologyInfo& technology_info(TechnologyClass cls);

/// Simplified standard-characteristic waveform at 10 MS/s, shifted to the
/// class's channel offset. Bluetooth: GFSK 1 Msym/s. Zigbee: O-QPSK half-sine
/// 2 Mchip/s with 802.15.4 32-chip spreading. WiFi: Barker-11 DSSS at 5 Mchip/s.
BasebandSignal synthesize_technology(TechnologyClass cls, std::size_t duration_samples,
                                     std::uint64_t seed);

/// Multiplies by e^{j 2 pi f n / fs}.
void frequency_shift(ComplexVector& x, double offset_hz, double sample_rate);

}  // namespace specsense::sigsynth
