// Constellation tables for every linear scheme.
//
// Conventions, shared by all tables:
//   * index = the symbol's bit word, first transmitted bit most significant;
//   * Gray coding, so nearest neighbours differ in exactly one bit;
//   * unit average energy over the table.
//
//   BPSK   0 -> +1, 1 -> -1
//   QPSK   word b0b1 -> ((1-2 b0) + j(1-2 b1)) / sqrt(2)
//   8PSK   point k at angle 2 pi k / 8 carries word gray(k)
//   PAM4   levels {-3,-1,+1,+3}/sqrt(5) carry words gray(0..3)
//   QAM16  high 2 bits pick the I level, low 2 bits the Q level, each axis a
//          Gray PAM4 on {-3,-1,1,3}; scaled by 1/sqrt(10)
//   QAM64  as QAM16 with 3 bits per axis on {-7..7}; scaled by 1/sqrt(42)

#include <cmath>
#include <numbers>

#include "specsense/sigsynth.hpp"

namespace specsense::sigsynth {

namespace {

constexpr unsigned gray(unsigned k) { return k ^ (k >> 1); }

// Gray-coded PAM levels -(L-1), ..., +(L-1) indexed by bit word (unscaled).
std::vector<double> gray_pam_levels(unsigned levels) {
  std::vector<double> out(levels);
  for (unsigned k = 0; k < levels; ++k)
    out[gray(k)] = 2.0 * static_cast<double>(k) - static_cast<double>(levels - 1);
  return out;
}

std::vector<Complex> make_square_qam(unsigned bits_per_axis) {
  const unsigned levels = 1u << bits_per_axis;
  const std::vector<double> axis = gray_pam_levels(levels);
  // Mean energy of a square QAM on odd integers: 2 (L^2 - 1) / 3.
  const double scale = 1.0 / std::sqrt(2.0 * (levels * levels - 1.0) / 3.0);
  std::vector<Complex> table(levels * levels);
  for (unsigned word = 0; word < table.size(); ++word) {
    const unsigned i_word = word >> bits_per_axis;
    const unsigned q_word = word & (levels - 1);
    table[word] = Complex(axis[i_word], axis[q_word]) * scale;
  }
  return table;
}

struct Tables {
  std::vector<Complex> bpsk{Complex(1, 0), Complex(-1, 0)};
  std::vector<Complex> qpsk;
  std::vector<Complex> psk8;
  std::vector<Complex> pam4;
  std::vector<Complex> qam16 = make_square_qam(2);
  std::vector<Complex> qam64 = make_square_qam(3);

  Tables() {
    const double r = 1.0 / std::sqrt(2.0);
    qpsk = {Complex(r, r), Complex(r, -r), Complex(-r, r), Complex(-r, -r)};
    psk8.resize(8);
    for (unsigned k = 0; k < 8; ++k) psk8[gray(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / 8.0);
    const std::vector<double> levels = gray_pam_levels(4);
    for (double l : levels) pam4.emplace_back(l / std::sqrt(5.0), 0.0);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

std::span<const Complex> constellation(Modulation m) noexcept {
  const Tables& t = tables();
  switch (m) {
    case Modulation::kBpsk: return t.bpsk;
    case Modulation::kQpsk: return t.qpsk;
    case Modulation::kPsk8: return t.psk8;
    case Modulation::kQam16: return t.qam16;
    case Modulation::kQam64: return t.qam64;
    case Modulation::kPam4: return t.pam4;
    default: return {};
  }
}

}  // namespace specsense::sigsynth
