#pragma once

// Mapping of raw captures to the three 2xN real representations.

#include <cstddef>
#include <span>
#include <vector>

#include "specsense/common.hpp"

namespace specsense::transforms {

/// A 2xN real matrix, row-major: data[row * length + col].
struct FeatureVector {
  Representation repr = Representation::kIq;
  std::size_t length = 0;
  std::vector<double> data;

  static constexpr std::size_t kRows = 2;

  double at(std::size_t row, std::size_t col) const { return data[row * length + col]; }
  double& at(std::size_t row, std::size_t col) { return data[row * length + col]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * length, length}; }
};

/// Unnormalized forward DFT, W[k] = sum_n x[n] e^{-j2 pi kn/N}, DC bin first.
/// Radix-2 for power-of-two lengths, direct evaluation otherwise.
ComplexVector dft(std::span<const Complex> x);

/// Inverse of dft(): x[n] = (1/N) sum_k W[k] e^{+j2 pi kn/N}.
ComplexVector idft(std::span<const Complex> w);

FeatureVector to_iq(const IqVector& r);
FeatureVector to_amp_phase(const IqVector& r);
FeatureVector to_fft_repr(const IqVector& r);

/// IQ and FFT: whole matrix to unit RMS. Amplitude/phase: amplitude row to
/// unit RMS, phase row untouched. A zero matrix is returned unchanged.
FeatureVector normalize(FeatureVector x);

/// Representation selected at run time, followed by normalize().
FeatureVector featurize(const IqVector& r, Representation repr);

}  // namespace specsense::transforms
