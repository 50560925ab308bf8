#include "specsense/nnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specsense/common.hpp"
#include "specsense/nnet/gemm.hpp"

namespace specsense::nnet {

Layer Layer::conv2d(std::size_t filters, std::size_t channels, std::size_t kh, std::size_t kw, Padding pad_h) {
  require(filters > 0 && channels > 0 && kh > 0 && kw > 0, ErrorCode::kInvalidArgument, "conv2d: zero dimension");
  Layer l;
  l.kind = LayerKind::kConv2d;
  l.weight_shape = {filters, channels, kh, kw};
  l.weights.assign(filters * channels * kh * kw, 0.0);
  l.bias.assign(filters, 0.0);
  l.pad_h = pad_h;
  return l;
}

Layer Layer::dense(std::size_t out, std::size_t in) {
  require(out > 0 && in > 0, ErrorCode::kInvalidArgument, "dense: zero dimension");
  Layer l;
  l.kind = LayerKind::kDense;
  l.weight_shape = {out, in};
  l.weights.assign(out * in, 0.0);
  l.bias.assign(out, 0.0);
  return l;
}

Layer Layer::relu() { return Layer{}; }

Layer Layer::dropout(double rate) {
  require(rate >= 0.0 && rate < 1.0, ErrorCode::kInvalidArgument, "dropout rate must be in [0, 1)");
  Layer l;
  l.kind = LayerKind::kDropout;
  l.rate = rate;
  return l;
}

Layer Layer::flatten() {
  Layer l;
  l.kind = LayerKind::kFlatten;
  return l;
}

Layer Layer::softmax() {
  Layer l;
  l.kind = LayerKind::kSoftmax;
  return l;
}

std::size_t pad_before(Padding p, std::size_t k) noexcept { return p == Padding::kSame ? (k - 1) / 2 : 0; }

Shape output_shape(const Layer& layer, const Shape& in) {
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      require(in.size() == 3, ErrorCode::kShapeMismatch, "conv2d expects a [C,H,W] input");
      const auto& ws = layer.weight_shape;
      require(in[0] == ws[1], ErrorCode::kShapeMismatch,
              "conv2d: input has " + std::to_string(in[0]) + " channels, layer expects " + std::to_string(ws[1]));
      std::size_t h = in[1];
      if (layer.pad_h == Padding::kValid) {
        require(h >= ws[2], ErrorCode::kShapeMismatch, "conv2d: VALID kernel taller than input");
        h = h - ws[2] + 1;
      }
      return {ws[0], h, in[2]};
    }
    case LayerKind::kDense:
      require(element_count(in) == layer.weight_shape[1] && in.size() == 1, ErrorCode::kShapeMismatch,
              "dense: input size " + std::to_string(element_count(in)) + " != " +
                  std::to_string(layer.weight_shape[1]));
      return {layer.weight_shape[0]};
    case LayerKind::kFlatten: return {element_count(in)};
    case LayerKind::kSoftmax:
      require(in.size() == 1, ErrorCode::kShapeMismatch, "softmax expects a flat input");
      return in;
    case LayerKind::kRelu:
    case LayerKind::kDropout: return in;
  }
  return in;
}

void im2col(const double* x, std::size_t c, std::size_t h, std::size_t w, const Layer& conv, double* col) {
  const std::size_t kh = conv.weight_shape[2], kw = conv.weight_shape[3];
  const std::size_t ho = conv.pad_h == Padding::kValid ? h - kh + 1 : h;
  const auto ph = static_cast<std::ptrdiff_t>(pad_before(conv.pad_h, kh));
  const auto pw = static_cast<std::ptrdiff_t>(pad_before(Padding::kSame, kw));
  const std::size_t cols = ho * w;
  for (std::size_t ci = 0; ci < c; ++ci)
    for (std::size_t u = 0; u < kh; ++u)
      for (std::size_t v = 0; v < kw; ++v) {
        double* row = col + ((ci * kh + u) * kw + v) * cols;
        for (std::size_t i = 0; i < ho; ++i) {
          const std::ptrdiff_t src_i = static_cast<std::ptrdiff_t>(i + u) - ph;
          double* dst = row + i * w;
          if (src_i < 0 || src_i >= static_cast<std::ptrdiff_t>(h)) {
            std::fill(dst, dst + w, 0.0);
            continue;
          }
          const double* src = x + (ci * h + static_cast<std::size_t>(src_i)) * w;
          for (std::size_t j = 0; j < w; ++j) {
            const std::ptrdiff_t src_j = static_cast<std::ptrdiff_t>(j + v) - pw;
            dst[j] = (src_j < 0 || src_j >= static_cast<std::ptrdiff_t>(w)) ? 0.0 : src[src_j];
          }
        }
      }
}

void col2im(const double* col, std::size_t c, std::size_t h, std::size_t w, const Layer& conv, double* dx) {
  const std::size_t kh = conv.weight_shape[2], kw = conv.weight_shape[3];
  const std::size_t ho = conv.pad_h == Padding::kValid ? h - kh + 1 : h;
  const auto ph = static_cast<std::ptrdiff_t>(pad_before(conv.pad_h, kh));
  const auto pw = static_cast<std::ptrdiff_t>(pad_before(Padding::kSame, kw));
  const std::size_t cols = ho * w;
  for (std::size_t ci = 0; ci < c; ++ci)
    for (std::size_t u = 0; u < kh; ++u)
      for (std::size_t v = 0; v < kw; ++v) {
        const double* row = col + ((ci * kh + u) * kw + v) * cols;
        for (std::size_t i = 0; i < ho; ++i) {
          const std::ptrdiff_t dst_i = static_cast<std::ptrdiff_t>(i + u) - ph;
          if (dst_i < 0 || dst_i >= static_cast<std::ptrdiff_t>(h)) continue;
          double* dst = dx + (ci * h + static_cast<std::size_t>(dst_i)) * w;
          for (std::size_t j = 0; j < w; ++j) {
            const std::ptrdiff_t dst_j = static_cast<std::ptrdiff_t>(j + v) - pw;
            if (dst_j >= 0 && dst_j < static_cast<std::ptrdiff_t>(w)) dst[dst_j] += row[i * w + j];
          }
        }
      }
}

Tensor conv2d_forward(const Tensor& x, const Layer& layer) {
  require(layer.kind == LayerKind::kConv2d, ErrorCode::kInvalidArgument, "conv2d_forward: not a conv layer");
  const Shape out_shape = output_shape(layer, x.shape);
  const std::size_t c = x.shape[0], h = x.shape[1], w = x.shape[2];
  const std::size_t f = out_shape[0], cols = out_shape[1] * out_shape[2];
  const std::size_t ckk = c * layer.weight_shape[2] * layer.weight_shape[3];
  std::vector<double> col(ckk * cols);
  im2col(x.data.data(), c, h, w, layer, col.data());
  Tensor y(out_shape);
  for (std::size_t fi = 0; fi < f; ++fi) std::fill_n(y.data.begin() + static_cast<long>(fi * cols), cols, layer.bias[fi]);
  gemm_acc(f, cols, ckk, layer.weights.data(), ckk, 1, col.data(), cols, y.data.data(), cols);
  return y;
}

Tensor dense_forward(const Tensor& x, const Layer& layer) {
  require(layer.kind == LayerKind::kDense, ErrorCode::kInvalidArgument, "dense_forward: not a dense layer");
  const std::size_t out = layer.weight_shape[0], in = layer.weight_shape[1];
  require(x.size() == in, ErrorCode::kShapeMismatch, "dense_forward: input size mismatch");
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double s = layer.bias[o];
    for (std::size_t i = 0; i < in; ++i) s += layer.weights[o * in + i] * x.data[i];
    y.data[o] = s;
  }
  return y;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

void dropout_mask(double rate, std::uint64_t key, std::span<double> mask) {
  if (rate == 0.0) {
    std::fill(mask.begin(), mask.end(), 1.0);
    return;
  }
  // Unit i takes the (i+1)-th output of SplitMix64(key), written as a pure
  // function of i so the loop vectorizes.
  constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  const double keep_scale = 1.0 / (1.0 - rate);
  // u = (z >> 11) 2^-53 < rate  <=>  (z >> 11) < ceil(rate 2^53)
  const auto threshold = static_cast<std::uint64_t>(std::ceil(std::ldexp(rate, 53)));
  const std::size_t n = mask.size();
  double* out = mask.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t z = key + (static_cast<std::uint64_t>(i) + 1) * kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    out[i] = (z >> 11) < threshold ? 0.0 : keep_scale;
  }
}

Tensor dropout(const Tensor& x, double rate, Mode mode, std::uint64_t seed) {
  require(rate >= 0.0 && rate < 1.0, ErrorCode::kInvalidArgument, "dropout rate must be in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) return x;
  std::vector<double> mask(x.size());
  dropout_mask(rate, seed, mask);
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] *= mask[i];
  return y;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.size());
  if (z.empty()) return p;
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += (p[i] = std::exp(z[i] - zmax));
  for (double& v : p) v /= sum;
  return p;
}

double cross_entropy(std::span<const double> yhat, std::span<const double> y_onehot) {
  require(yhat.size() == y_onehot.size(), ErrorCode::kShapeMismatch, "cross_entropy: length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < yhat.size(); ++i)
    // min(.,1) keeps a perfect prediction at exactly zero instead of -1e-12
    if (y_onehot[i] != 0.0) loss -= y_onehot[i] * std::log(std::min(yhat[i] + kLogClip, 1.0));
  return loss;
}

}  // namespace specsense::nnet
