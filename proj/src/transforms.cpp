#include "specsense/transforms.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace specsense::transforms {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

// Iterative decimation-in-time FFT; sign = -1 forward, +1 inverse (unscaled).
void fft_in_place(ComplexVector& a, double sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles computed directly per index; no accumulated recurrence error.
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      const Complex w(std::cos(angle), std::sin(angle));
      for (std::size_t i = 0; i < n; i += len) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

ComplexVector direct_dft(std::span<const Complex> x, double sign) {
  const std::size_t n = x.size();
  ComplexVector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // Reduce k*t mod n first to keep the angle small.
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * Complex(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

ComplexVector transform(std::span<const Complex> x, double sign) {
  if (is_power_of_two(x.size())) {
    ComplexVector a(x.begin(), x.end());
    fft_in_place(a, sign);
    return a;
  }
  return direct_dft(x, sign);
}

FeatureVector make(Representation repr, std::size_t n) {
  FeatureVector f;
  f.repr = repr;
  f.length = n;
  f.data.assign(FeatureVector::kRows * n, 0.0);
  return f;
}

double rms(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

ComplexVector dft(std::span<const Complex> x) { return transform(x, -1.0); }

ComplexVector idft(std::span<const Complex> w) {
  ComplexVector out = transform(w, +1.0);
  const double scale = w.empty() ? 0.0 : 1.0 / static_cast<double>(w.size());
  for (auto& v : out) v *= scale;
  return out;
}

FeatureVector to_iq(const IqVector& r) {
  FeatureVector f = make(Representation::kIq, r.size());
  for (std::size_t n = 0; n < r.size(); ++n) {
    f.at(0, n) = r.samples[n].real();
    f.at(1, n) = r.samples[n].imag();
  }
  return f;
}

FeatureVector to_amp_phase(const IqVector& r) {
  FeatureVector f = make(Representation::kAmpPhase, r.size());
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double i = r.samples[n].real();
    const double q = r.samples[n].imag();
    f.at(0, n) = std::hypot(i, q);
    // atan2(0, 0) == 0, which is the declared convention for a null sample.
    // atan2 returns -pi for (-x, -0.0); fold that onto +pi to stay in (-pi, pi].
    double phase = std::atan2(q, i);
    if (phase == -std::numbers::pi) phase = std::numbers::pi;
    f.at(1, n) = phase / std::numbers::pi;
  }
  return f;
}

FeatureVector to_fft_repr(const IqVector& r) {
  const ComplexVector w = dft(r.to_complex());
  FeatureVector f = make(Representation::kFft, r.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    f.at(0, k) = w[k].real();
    f.at(1, k) = w[k].imag();
  }
  return f;
}

FeatureVector normalize(FeatureVector x) {
  if (x.repr == Representation::kAmpPhase) {
    std::span<double> amplitude(x.data.data(), x.length);
    const double s = rms(amplitude);
    if (s > 0.0)
      for (double& v : amplitude) v /= s;
    return x;
  }
  const double s = rms(x.data);
  if (s > 0.0)
    for (double& v : x.data) v /= s;
  return x;
}

FeatureVector featurize(const IqVector& r, Representation repr) {
  switch (repr) {
    case Representation::kIq: return normalize(to_iq(r));
    case Representation::kAmpPhase: return normalize(to_amp_phase(r));
    case Representation::kFft: return normalize(to_fft_repr(r));
  }
  fail(ErrorCode::kUnsupported, "unknown representation");
}

}  // namespace specsense::transforms
