#pragma once

// Layer definitions and the single-example reference ops. Convolution is the
// cross-correlation form (no kernel flip):
//   out[f,i,j] = b[f] + sum_{c,u,v} x[c, i+u-ph, j+v-pw] W[f,c,u,v]
// Width padding is always SAME; height padding is SAME or VALID.

#include <cstdint>
#include <span>
#include <vector>

#include "specsense/nnet/tensor.hpp"

namespace specsense::nnet {

enum class LayerKind : std::uint8_t { kConv2d, kDense, kRelu, kDropout, kFlatten, kSoftmax };
enum class Padding : std::uint8_t { kSame, kValid };
enum class Mode : std::uint8_t { kTrain, kEval };

struct Layer {
  LayerKind kind = LayerKind::kRelu;
  Shape weight_shape;           // conv [F, C, kh, kw]; dense [out, in]; otherwise empty
  std::vector<double> weights;  // row-major over weight_shape
  std::vector<double> bias;     // [F] or [out]
  Padding pad_h = Padding::kSame;
  double rate = 0.0;  // dropout drop probability

  static Layer conv2d(std::size_t filters, std::size_t channels, std::size_t kh, std::size_t kw, Padding pad_h);
  static Layer dense(std::size_t out, std::size_t in);
  static Layer relu();
  static Layer dropout(double rate);
  static Layer flatten();
  static Layer softmax();

  bool has_params() const noexcept { return kind == LayerKind::kConv2d || kind == LayerKind::kDense; }
  std::size_t param_count() const noexcept { return weights.size() + bias.size(); }
};

/// Output shape for an input shape ([C,H,W] for conv; flat [n] for dense).
Shape output_shape(const Layer& layer, const Shape& in);

/// Leading padding along a kernel axis of length k.
std::size_t pad_before(Padding p, std::size_t k) noexcept;

Tensor conv2d_forward(const Tensor& x, const Layer& layer);
Tensor dense_forward(const Tensor& x, const Layer& layer);
Tensor relu(const Tensor& x);

/// Inverted dropout. Train mode zeroes each unit with probability `rate` and
/// scales survivors by 1/(1-rate); eval mode is the identity.
Tensor dropout(const Tensor& x, double rate, Mode mode, std::uint64_t seed);

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> z);

inline constexpr double kLogClip = 1e-12;

/// -sum y_i log(yhat_i + 1e-12)
double cross_entropy(std::span<const double> yhat, std::span<const double> y_onehot);

// ---------------------------------------------------------------------------
// Kernels used by the batched engine.

/// Column matrix [C*kh*kw, Ho*W] for one example x[C,H,W].
void im2col(const double* x, std::size_t c, std::size_t h, std::size_t w, const Layer& conv, double* col);
/// Scatter-add of a column matrix back into dx[C,H,W].
void col2im(const double* col, std::size_t c, std::size_t h, std::size_t w, const Layer& conv, double* dx);

/// Dropout keep/scale factor for unit `unit` under a given mask key.
void dropout_mask(double rate, std::uint64_t key, std::span<double> mask);

}  // namespace specsense::nnet
