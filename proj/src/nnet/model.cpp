#include "specsense/nnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specsense/nnet/gemm.hpp"

namespace specsense::nnet {

namespace {

constexpr std::uint64_t kInitStream = 31;
constexpr std::uint64_t kDropoutStream = 41;
constexpr std::size_t kShards = 4;
constexpr std::size_t kPredictChunk = 64;

struct ShardBuffers {
  Trace trace;
  Gradients grads;
};

void check_input(const Model& model, std::size_t count) {
  require(count > 0, ErrorCode::kInvalidArgument, "empty batch");
  require(!model.layers.empty() && model.layers.back().kind == LayerKind::kSoftmax, ErrorCode::kInvalidArgument,
          "model must end in a softmax layer");
}

}  // namespace

ModelConfig ModelConfig::full() { return {256, 80, 256, 0.6}; }
ModelConfig ModelConfig::desk() { return {64, 32, 128, 0.6}; }

std::size_t Model::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.param_count();
  return n;
}

std::vector<Shape> Model::shape_chain() const {
  std::vector<Shape> chain{input_shape};
  for (const auto& l : layers) chain.push_back(output_shape(l, chain.back()));
  return chain;
}

void Model::quantize_f32() {
  for (auto& l : layers) {
    for (double& v : l.weights) v = static_cast<double>(static_cast<float>(v));
    for (double& v : l.bias) v = static_cast<double>(static_cast<float>(v));
  }
}

Model build_model(const ModelConfig& config, std::size_t capture_length, std::size_t num_classes,
                  std::uint64_t seed) {
  require(capture_length >= 1, ErrorCode::kInvalidArgument, "capture length must be >= 1");
  require(num_classes >= 2, ErrorCode::kInvalidArgument, "need at least two classes");
  Model m;
  m.input_shape = {1, 2, capture_length};
  m.num_classes = num_classes;
  m.layers = {
      Layer::conv2d(config.conv1_filters, 1, 1, 3, Padding::kSame),
      Layer::relu(),
      Layer::dropout(config.dropout),
      Layer::conv2d(config.conv2_filters, config.conv1_filters, 2, 3, Padding::kValid),
      Layer::relu(),
      Layer::dropout(config.dropout),
      Layer::flatten(),
      Layer::dense(config.dense_units, config.conv2_filters * capture_length),
      Layer::relu(),
      Layer::dropout(config.dropout),
      Layer::dense(num_classes, config.dense_units),
      Layer::softmax(),
  };
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Layer& layer = m.layers[l];
    if (!layer.has_params()) continue;
    const auto& ws = layer.weight_shape;
    double fan_in, fan_out;
    if (layer.kind == LayerKind::kConv2d) {
      fan_in = static_cast<double>(ws[1] * ws[2] * ws[3]);
      fan_out = static_cast<double>(ws[0] * ws[2] * ws[3]);
    } else {
      fan_in = static_cast<double>(ws[1]);
      fan_out = static_cast<double>(ws[0]);
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng(mix_seed(seed, kInitStream, l));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights) w = dist(rng);
  }
  m.shape_chain();  // validates
  return m;
}

Gradients Gradients::zeros_like(const Model& model) {
  Gradients g;
  for (const auto& l : model.layers) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.bias.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

void Gradients::clear() {
  for (auto& v : weights) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : bias) std::fill(v.begin(), v.end(), 0.0);
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
    for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += other.bias[l][i];
  }
}

void Gradients::scale(double s) {
  for (auto& v : weights)
    for (double& x : v) x *= s;
  for (auto& v : bias)
    for (double& x : v) x *= s;
}

double Gradients::norm() const {
  double s = 0.0;
  for (const auto& v : weights)
    for (double x : v) s += x * x;
  for (const auto& v : bias)
    for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::uint64_t dropout_key(std::uint64_t seed, std::uint64_t step, std::uint64_t example, std::size_t layer) noexcept {
  return mix_seed(mix_seed(seed, kDropoutStream, step), example, layer);
}

void forward(const Model& model, const double* x, std::size_t count, Mode mode, Trace& trace, std::uint64_t seed,
             std::uint64_t step, std::span<const std::uint64_t> example_ids) {
  check_input(model, count);
  const std::vector<Shape> chain = model.shape_chain();
  const std::size_t n_layers = model.layers.size();
  trace.count = count;
  trace.acts.resize(n_layers + 1);
  trace.masks.resize(n_layers);
  trace.acts[0].assign(x, x + count * model.input_size());
  thread_local std::vector<double> scratch;

  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = model.layers[l];
    const std::size_t in_sz = element_count(chain[l]);
    const std::size_t out_sz = element_count(chain[l + 1]);
    const std::vector<double>& src = trace.acts[l];
    std::vector<double>& dst = trace.acts[l + 1];
    dst.resize(count * out_sz);
    switch (layer.kind) {
      case LayerKind::kConv2d: {
        const std::size_t c = chain[l][0], h = chain[l][1], w = chain[l][2];
        const std::size_t f = chain[l + 1][0], cols = chain[l + 1][1] * chain[l + 1][2];
        const std::size_t ckk = c * layer.weight_shape[2] * layer.weight_shape[3];
        scratch.resize(ckk * cols);
        for (std::size_t e = 0; e < count; ++e) {
          im2col(src.data() + e * in_sz, c, h, w, layer, scratch.data());
          double* y = dst.data() + e * out_sz;
          for (std::size_t fi = 0; fi < f; ++fi) std::fill_n(y + fi * cols, cols, layer.bias[fi]);
          gemm_acc(f, cols, ckk, layer.weights.data(), ckk, 1, scratch.data(), cols, y, cols);
        }
        break;
      }
      case LayerKind::kDense: {
        // y^T[out, count] = W x^T: transposing the batch is much cheaper than
        // transposing the weights.
        const std::size_t out = layer.weight_shape[0], in = layer.weight_shape[1];
        scratch.resize(in * count + out * count);
        double* xt = scratch.data();
        double* yt = xt + in * count;
        transpose(src.data(), count, in, xt);
        for (std::size_t o = 0; o < out; ++o) std::fill_n(yt + o * count, count, layer.bias[o]);
        gemm_acc(out, count, in, layer.weights.data(), in, 1, xt, count, yt, count);
        transpose(yt, out, count, dst.data());
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
        break;
      case LayerKind::kDropout: {
        std::vector<double>& mask = trace.masks[l];
        if (mode == Mode::kEval || layer.rate == 0.0) {
          mask.clear();
          std::copy(src.begin(), src.end(), dst.begin());
          break;
        }
        require(example_ids.size() == count, ErrorCode::kInvalidArgument, "forward: one example id per input needed");
        mask.resize(count * out_sz);
        for (std::size_t e = 0; e < count; ++e)
          dropout_mask(layer.rate, dropout_key(seed, step, example_ids[e], l),
                       std::span<double>(mask.data() + e * out_sz, out_sz));
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * mask[i];
        break;
      }
      case LayerKind::kFlatten: std::copy(src.begin(), src.end(), dst.begin()); break;
      case LayerKind::kSoftmax:
        for (std::size_t e = 0; e < count; ++e) {
          const auto p = softmax(std::span<const double>(src.data() + e * in_sz, in_sz));
          std::copy(p.begin(), p.end(), dst.begin() + static_cast<long>(e * out_sz));
        }
        break;
    }
  }
}

double backward(const Model& model, const Trace& trace, std::span<const std::uint16_t> labels, double loss_scale,
                Gradients& grads) {
  const std::size_t count = trace.count;
  const std::size_t n_layers = model.layers.size();
  require(labels.size() == count, ErrorCode::kShapeMismatch, "backward: label count mismatch");
  require(trace.acts.size() == n_layers + 1, ErrorCode::kInvalidArgument, "backward: no cached forward pass");
  const std::vector<Shape> chain = model.shape_chain();
  const std::size_t k = model.num_classes;

  // Softmax + cross-entropy: dL/dz = p - y.
  const std::vector<double>& probs = trace.acts[n_layers];
  std::vector<double> g(count * k), dx;
  double loss = 0.0;
  for (std::size_t e = 0; e < count; ++e) {
    require(labels[e] < k, ErrorCode::kLabelOutOfRange, "backward: label out of range");
    const double* p = probs.data() + e * k;
    loss -= std::log(std::min(p[labels[e]] + kLogClip, 1.0));
    for (std::size_t i = 0; i < k; ++i) g[e * k + i] = loss_scale * (p[i] - (i == labels[e] ? 1.0 : 0.0));
  }

  thread_local std::vector<double> col, col_t, dcol, dw_t;
  for (std::size_t l = n_layers - 1; l-- > 0;) {
    const Layer& layer = model.layers[l];
    const std::size_t in_sz = element_count(chain[l]);
    const std::size_t out_sz = element_count(chain[l + 1]);
    const std::vector<double>& x = trace.acts[l];
    const bool need_dx = l > 0;
    dx.assign(need_dx ? count * in_sz : 0, 0.0);
    switch (layer.kind) {
      case LayerKind::kConv2d: {
        const std::size_t c = chain[l][0], h = chain[l][1], w = chain[l][2];
        const std::size_t f = chain[l + 1][0], cols = chain[l + 1][1] * chain[l + 1][2];
        const std::size_t ckk = c * layer.weight_shape[2] * layer.weight_shape[3];
        col.resize(ckk * cols);
        col_t.resize(ckk * cols);
        dcol.resize(ckk * cols);
        std::vector<double>& dw = grads.weights[l];
        std::vector<double>& db = grads.bias[l];
        const bool narrow = ckk < 16;
        col_t.resize(std::max(ckk, f) * cols);
        if (narrow) dw_t.assign(ckk * f, 0.0);
        for (std::size_t e = 0; e < count; ++e) {
          const double* ge = g.data() + e * out_sz;
          im2col(x.data() + e * in_sz, c, h, w, layer, col.data());
          if (narrow) {
            // dW^T[ckk, F] += col g^T keeps the long F axis in the vector lanes.
            transpose(ge, f, cols, col_t.data());
            gemm_acc(ckk, f, cols, col.data(), cols, 1, col_t.data(), f, dw_t.data(), f);
          } else {
            transpose(col.data(), ckk, cols, col_t.data());
            gemm_acc(f, ckk, cols, ge, cols, 1, col_t.data(), ckk, dw.data(), ckk);
          }
          for (std::size_t fi = 0; fi < f; ++fi) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += ge[fi * cols + j];
            db[fi] += s;
          }
          if (need_dx) {
            std::fill(dcol.begin(), dcol.end(), 0.0);
            gemm_acc(ckk, cols, f, layer.weights.data(), 1, ckk, ge, cols, dcol.data(), cols);
            col2im(dcol.data(), c, h, w, layer, dx.data() + e * in_sz);
          }
        }
        if (narrow)
          for (std::size_t fi = 0; fi < f; ++fi)
            for (std::size_t j = 0; j < ckk; ++j) dw[fi * ckk + j] += dw_t[j * f + fi];
        break;
      }
      case LayerKind::kDense: {
        const std::size_t out = layer.weight_shape[0], in = layer.weight_shape[1];
        gemm_acc(out, in, count, g.data(), 1, out, x.data(), in, grads.weights[l].data(), in);
        std::vector<double>& db = grads.bias[l];
        for (std::size_t e = 0; e < count; ++e)
          for (std::size_t o = 0; o < out; ++o) db[o] += g[e * out + o];
        if (need_dx) gemm_acc(count, in, out, g.data(), out, 1, layer.weights.data(), in, dx.data(), in);
        break;
      }
      case LayerKind::kRelu: {
        const std::vector<double>& y = trace.acts[l + 1];
        if (need_dx)
          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = y[i] > 0.0 ? g[i] : 0.0;
        break;
      }
      case LayerKind::kDropout: {
        const std::vector<double>& mask = trace.masks[l];
        if (need_dx)
          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = mask.empty() ? g[i] : g[i] * mask[i];
        break;
      }
      case LayerKind::kFlatten:
        if (need_dx) std::copy(g.begin(), g.end(), dx.begin());
        break;
      case LayerKind::kSoftmax: fail(ErrorCode::kInvalidArgument, "softmax is only supported as the last layer");
    }
    g.swap(dx);
  }
  return loss;
}

namespace {

// Thread-local shard buffers outlive a model; reuse them only when every
// parameter block still has the same size.
bool same_layout(const Gradients& g, const Model& model) {
  if (g.weights.size() != model.layers.size()) return false;
  for (std::size_t l = 0; l < model.layers.size(); ++l)
    if (g.weights[l].size() != model.layers[l].weights.size() || g.bias[l].size() != model.layers[l].bias.size())
      return false;
  return true;
}

}  // namespace

double batch_gradients(const Model& model, const double* x, std::span<const std::uint16_t> labels, Mode mode,
                       std::uint64_t seed, std::uint64_t step, std::span<const std::uint64_t> example_ids,
                       Gradients& grads) {
  const std::size_t n = labels.size();
  check_input(model, n);
  require(mode == Mode::kEval || example_ids.size() == n, ErrorCode::kInvalidArgument,
          "batch_gradients: one example id per input needed");
  thread_local std::vector<ShardBuffers> shards;
  shards.resize(kShards);
  const std::size_t in_sz = model.input_size();
  std::vector<double> losses(kShards, 0.0);
  parallel_for(kShards, [&](std::size_t s0, std::size_t s1) {
    for (std::size_t s = s0; s < s1; ++s) {
      const std::size_t begin = s * n / kShards, end = (s + 1) * n / kShards;
      ShardBuffers& buf = shards[s];
      if (!same_layout(buf.grads, model)) buf.grads = Gradients::zeros_like(model);
      else buf.grads.clear();
      if (begin == end) continue;
      const auto ids = example_ids.empty() ? example_ids : example_ids.subspan(begin, end - begin);
      forward(model, x + begin * in_sz, end - begin, mode, buf.trace, seed, step, ids);
      losses[s] = backward(model, buf.trace, labels.subspan(begin, end - begin), 1.0 / static_cast<double>(n),
                           buf.grads);
    }
  });
  grads = shards[0].grads;
  double loss = losses[0];
  for (std::size_t s = 1; s < kShards; ++s) {
    grads.add(shards[s].grads);
    loss += losses[s];
  }
  return loss / static_cast<double>(n);
}

std::vector<double> predict_proba(const Model& model, const double* x, std::size_t count) {
  check_input(model, count);
  const std::size_t k = model.num_classes;
  const std::size_t in_sz = model.input_size();
  std::vector<double> out(count * k);
  const std::size_t chunks = (count + kPredictChunk - 1) / kPredictChunk;
  parallel_for(chunks, [&](std::size_t c0, std::size_t c1) {
    Trace trace;
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t begin = c * kPredictChunk, end = std::min(count, begin + kPredictChunk);
      forward(model, x + begin * in_sz, end - begin, Mode::kEval, trace);
      std::copy(trace.acts.back().begin(), trace.acts.back().end(), out.begin() + static_cast<long>(begin * k));
    }
  });
  return out;
}

double batch_loss(const Model& model, const double* x, std::span<const std::uint16_t> labels) {
  const std::vector<double> p = predict_proba(model, x, labels.size());
  const std::size_t k = model.num_classes;
  double loss = 0.0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    require(labels[e] < k, ErrorCode::kLabelOutOfRange, "label out of range");
    loss -= std::log(std::min(p[e * k + labels[e]] + kLogClip, 1.0));
  }
  return loss / static_cast<double>(labels.size());
}

std::size_t argmax(std::span<const double> v) noexcept {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Prediction predict(const Model& model, std::span<const double> x) {
  require(x.size() == model.input_size(), ErrorCode::kShapeMismatch,
          "predict: input has " + std::to_string(x.size()) + " values, model expects " +
              std::to_string(model.input_size()));
  Prediction p;
  p.probabilities = predict_proba(model, x.data(), 1);
  p.label = argmax(p.probabilities);
  return p;
}

}  // namespace specsense::nnet
