#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "specsense/sigsynth.hpp"

using namespace specsense;
using namespace specsense::sigsynth;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::uint8_t> word_bits(std::size_t word, std::size_t k) {
  std::vector<std::uint8_t> bits(k);
  for (std::size_t b = 0; b < k; ++b) bits[b] = static_cast<std::uint8_t>((word >> (k - 1 - b)) & 1u);
  return bits;
}

}  // namespace

TEST_SUITE("sigsynth") {

TEST_CASE("inventory has eleven schemes with the expected names") {
  CHECK(kAllModulations.size() == 11);
  std::set<std::string_view> names;
  for (auto m : kAllModulations) names.insert(name(m));
  CHECK(names.size() == 11);
  CHECK(name(Modulation::kQam16) == "QAM16");
}

TEST_CASE("BPSK, QPSK and PAM4 tables") {
  const std::vector<std::uint8_t> bits{0, 1};
  const auto b = map_bits_to_symbols(bits, Modulation::kBpsk);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == Complex(1, 0));
  CHECK(b[1] == Complex(-1, 0));

  const std::vector<std::uint8_t> zeros{0, 0};
  const auto q = map_bits_to_symbols(zeros, Modulation::kQpsk);
  CHECK(std::abs(q[0] - Complex(1, 1) / std::sqrt(2.0)) < 1e-12);

  std::set<double> levels;
  for (std::size_t w = 0; w < 4; ++w) {
    const auto s = map_bits_to_symbols(word_bits(w, 2), Modulation::kPam4);
    CHECK(s[0].imag() == 0.0);
    levels.insert(std::round(s[0].real() * std::sqrt(5.0)));
  }
  CHECK(levels == std::set<double>{-3, -1, 1, 3});
}

TEST_CASE("every table has unit mean energy") {
  for (auto m : kAllModulations) {
    if (!is_linear(m)) continue;
    const auto table = constellation(m);
    CHECK(table.size() == (std::size_t{1} << bits_per_symbol(m)));
    double e = 0;
    for (const auto& s : table) e += std::norm(s);
    CHECK(e / static_cast<double>(table.size()) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Gray adjacency: nearest neighbours differ in one bit") {
  for (auto m : {Modulation::kQpsk, Modulation::kPsk8, Modulation::kQam16, Modulation::kQam64, Modulation::kPam4,
                 Modulation::kBpsk}) {
    const auto t = constellation(m);
    double dmin = 1e9;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j) dmin = std::min(dmin, std::abs(t[i] - t[j]));
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j)
        if (std::abs(t[i] - t[j]) < dmin * (1 + 1e-9)) CHECK(std::popcount(i ^ j) == 1);
  }
}

TEST_CASE("bit mapping errors") {
  const std::vector<std::uint8_t> three{0, 1, 1};
  CHECK_THROWS_AS(map_bits_to_symbols(three, Modulation::kQpsk), Error);
  CHECK_THROWS_AS(map_bits_to_symbols(three, Modulation::kCpfsk), Error);
  CHECK_THROWS_AS(map_bits_to_symbols(three, Modulation::kWbfm), Error);
}

TEST_CASE("pulse shaping") {
  SUBCASE("single symbol peaks at the centre tap") {
    const std::vector<Complex> one{Complex(1, 0)};
    const auto h = rrc_taps(8, 0.35, 8);
    const auto y = pulse_shape(one, 8, 0.35, 8);
    REQUIRE(y.samples.size() == 8);
    CHECK(std::abs(y.samples[0] - h[h.size() / 2]) < 1e-12);
    double peak = 0;
    for (auto v : y.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(std::abs(y.samples[0])));
  }
  SUBCASE("zeros in, zeros out") {
    const std::vector<Complex> z(16, Complex(0, 0));
    for (auto v : pulse_shape(z, 8).samples) CHECK(v == Complex(0, 0));
  }
  SUBCASE("alternating BPSK puts its peak at half the symbol rate") {
    std::vector<Complex> s(32);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 2 ? -1.0 : 1.0;
    const auto y = pulse_shape(s, 8);
    CHECK(y.samples.size() == 256);
    // fs = 1 normalized, f_sym = 1/8 -> peak at |f| = 1/16
    CHECK(std::abs(std::abs(oracle::peak_frequency(y.samples, 1.0)) - 1.0 / 16) < 1e-9);
  }
  SUBCASE("parameter validation") {
    const std::vector<Complex> s{1.0};
    CHECK_THROWS_AS(pulse_shape(s, 1), Error);
    CHECK_THROWS_AS(rrc_taps(8, 0.35, 2), Error);
  }
}

TEST_CASE("FSK") {
  SUBCASE("constant ones give a tone at +f_sym/4") {
    const std::vector<std::uint8_t> ones(32, 1);
    const auto y = modulate_fsk(ones, Modulation::kCpfsk, 8, 0.5);
    CHECK(oracle::peak_frequency(y.samples, 1.0) == doctest::Approx(1.0 / 32));
  }
  SUBCASE("constant envelope") {
    Rng rng(3);
    std::vector<std::uint8_t> bits(100);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    for (auto scheme : {Modulation::kCpfsk, Modulation::kGfsk})
      for (auto v : modulate_fsk(bits, scheme, 10, 0.5, 0.3).samples) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-9);
  }
  SUBCASE("bits [1,0] swing the phase +pi h then back") {
    const std::vector<std::uint8_t> bits{1, 0};
    const double h = 0.5;
    const auto y = modulate_fsk(bits, Modulation::kCpfsk, 8, h);
    CHECK(std::arg(y.samples[7]) == doctest::Approx(kPi * h));
    CHECK(std::abs(std::arg(y.samples[15])) < 1e-12);
    for (std::size_t i = 1; i < y.samples.size(); ++i)
      CHECK(std::abs(std::arg(y.samples[i] / y.samples[i - 1])) <= kPi * h / 8 + 1e-12);
  }
}

TEST_CASE("analog modulation") {
  SUBCASE("AM-DSB with silence is a constant carrier") {
    const std::vector<double> m(64, 0.0);
    for (auto v : modulate_analog(Modulation::kAmDsb, m).samples) CHECK(v == Complex(1, 0));
  }
  SUBCASE("WBFM with constant message is a tone at kf c") {
    const AnalogParams p;
    const double c = 0.2;
    const std::vector<double> m(200, c);  // 200 samples at 200 kHz -> 1 kHz bins
    const auto y = modulate_analog(Modulation::kWbfm, m, p);
    CHECK(oracle::peak_frequency(y.samples, p.sample_rate) == doctest::Approx(p.fm_deviation_hz * c));
    for (auto v : y.samples) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-9);
  }
  SUBCASE("AM-SSB of one tone is one line on one side of DC") {
    std::vector<double> m(128);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::cos(2 * kPi * 8 * static_cast<double>(i) / 128);
    const auto w = oracle::direct_dft(modulate_analog(Modulation::kAmSsb, m).samples);
    CHECK(std::abs(w[8]) > 100);
    CHECK(std::abs(w[128 - 8]) < 1e-9);
  }
  SUBCASE("over-range message is rejected") {
    const std::vector<double> m{0.5, 1.5};
    CHECK_THROWS_AS(modulate_analog(Modulation::kAmDsb, m), Error);
  }
  SUBCASE("synthetic message is peak-normalized with bounded silence") {
    Rng rng(11);
    const auto m = synthetic_message(4000, 200e3, rng);
    double peak = 0;
    std::size_t zeros = 0;
    for (double v : m) {
      peak = std::max(peak, std::abs(v));
      zeros += v == 0.0;
    }
    CHECK(peak <= 1.0 + 1e-12);
    CHECK(static_cast<double>(zeros) / 4000.0 <= 0.3);
  }
}

TEST_CASE("synthesized modulation streams") {
  for (auto m : kAllModulations) {
    const auto a = synthesize_modulation(m, 384, 42);
    const auto b = synthesize_modulation(m, 384, 42);
    CHECK(a.samples.size() == 384);
    CHECK(a.samples == b.samples);
    for (auto v : a.samples) CHECK(std::isfinite(v.real()));
    if (is_linear(m) || m == Modulation::kCpfsk || m == Modulation::kGfsk) {
      // 8..16 samples per symbol -> 8..16 symbols per 128-sample capture
      CHECK(a.sps >= 8);
      CHECK(a.sps <= 16);
    }
  }
}

TEST_CASE("technology classes") {
  const auto classes = technology_classes();
  CHECK(classes.size() == 15);
  std::set<std::string_view> names;
  for (const auto& c : classes) {
    names.insert(c.name);
    CHECK(std::abs(c.offset_hz) + c.bandwidth_hz / 2 <= kTechnologySampleRate / 2 + 1e6);
  }
  CHECK(names.size() == 15);

  SUBCASE("deterministic per seed") {
    const TechnologyClass wifi{Technology::kWifi, 1};
    CHECK(synthesize_technology(wifi, 512, 5).samples == synthesize_technology(wifi, 512, 5).samples);
    CHECK(synthesize_technology(wifi, 512, 5).samples != synthesize_technology(wifi, 512, 6).samples);
  }

  SUBCASE("Bluetooth energy centroid sits on the channel") {
    const TechnologyClass bt{Technology::kBluetooth, 6};
    REQUIRE(technology_info(bt).offset_hz == doctest::Approx(2e6));
    const auto y = synthesize_technology(bt, 4096, 9).samples;
    const auto w = oracle::direct_dft(y);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      double f = static_cast<double>(k) * kTechnologySampleRate / static_cast<double>(w.size());
      if (f >= kTechnologySampleRate / 2) f -= kTechnologySampleRate;
      num += f * std::norm(w[k]);
      den += std::norm(w[k]);
    }
    CHECK(std::abs(num / den - 2e6) <= 200e3);
  }

  SUBCASE("Zigbee occupied bandwidth is about 2 MHz") {
    // Half-sine O-QPSK has a 3 dB width of ~0.6 chip rate, so the 2 MHz
    // figure is checked as the 99%-power occupied bandwidth. Welch average
    // over 32 segments of 1024 samples (~10 kHz bins).
    const TechnologyClass zb{Technology::kZigbee, 1};
    const std::size_t seg = 1024;
    std::vector<double> psd(seg, 0.0);
    for (std::uint64_t s = 0; s < 32; ++s) {
      const auto w = oracle::direct_dft(synthesize_technology(zb, seg, 100 + s).samples);
      for (std::size_t k = 0; k < seg; ++k) psd[(k + seg / 2) % seg] += std::norm(w[k]);  // ascending frequency
    }
    double total = 0, peak = 0;
    for (double v : psd) {
      total += v;
      peak = std::max(peak, v);
    }
    std::size_t lo = 0, hi = seg - 1;
    double acc = 0;
    for (std::size_t k = 0; k < seg; ++k)
      if ((acc += psd[k]) >= 0.005 * total) {
        lo = k;
        break;
      }
    acc = 0;
    for (std::size_t k = seg; k-- > 0;)
      if ((acc += psd[k]) >= 0.005 * total) {
        hi = k;
        break;
      }
    const double bin = kTechnologySampleRate / static_cast<double>(seg);
    const double bw = static_cast<double>(hi - lo + 1) * bin;
    std::size_t half_lo = seg, half_hi = 0;
    for (std::size_t k = 0; k < seg; ++k)
      if (psd[k] >= peak / 2) {
        half_lo = std::min(half_lo, k);
        half_hi = std::max(half_hi, k);
      }
    MESSAGE("Zigbee 99% occupied bandwidth " << bw / 1e6 << " MHz, 3 dB width "
                                            << static_cast<double>(half_hi - half_lo + 1) * bin / 1e6 << " MHz");
    CHECK(bw >= 1.5e6);
    CHECK(bw <= 2.5e6);
  }

  SUBCASE("unknown class is rejected") {
    CHECK_THROWS_AS(technology_info({Technology::kZigbee, 7}), Error);
  }
}

}  // TEST_SUITE
