#include "specsense/nnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <numeric>
#include <string>

namespace specsense::nnet {

namespace {

constexpr std::uint64_t kShuffleStream = 51;

void check_set(const Model& model, const FeatureSet& set, const char* which) {
  require(set.size() > 0, ErrorCode::kInvalidArgument, std::string(which) + " set is empty");
  require(set.feature_size == model.input_size(), ErrorCode::kShapeMismatch,
          std::string(which) + " features have " + std::to_string(set.feature_size) + " values, model expects " +
              std::to_string(model.input_size()));
  require(set.x.size() == set.size() * set.feature_size, ErrorCode::kShapeMismatch,
          std::string(which) + " set: feature buffer length mismatch");
  for (auto y : set.labels)
    require(y < model.num_classes, ErrorCode::kLabelOutOfRange,
            std::string(which) + " set: label " + std::to_string(y) + " >= K=" + std::to_string(model.num_classes));
}

bool params_finite(const Model& model) {
  for (const auto& l : model.layers) {
    for (double v : l.weights)
      if (!std::isfinite(v)) return false;
    for (double v : l.bias)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

// Mean loss and accuracy in eval mode.
std::pair<double, double> evaluate(const Model& model, const FeatureSet& set) {
  const std::vector<double> p = predict_proba(model, set.x.data(), set.size());
  const std::size_t k = model.num_classes;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t e = 0; e < set.size(); ++e) {
    const std::span<const double> row(p.data() + e * k, k);
    loss -= std::log(std::min(row[set.labels[e]] + kLogClip, 1.0));
    if (argmax(row) == set.labels[e]) ++correct;
  }
  const auto n = static_cast<double>(set.size());
  return {loss / n, static_cast<double>(correct) / n};
}

}  // namespace

AdamState AdamState::zeros_like(const Model& model) {
  AdamState s;
  for (const auto& l : model.layers) {
    s.m_w.emplace_back(l.weights.size(), 0.0);
    s.v_w.emplace_back(l.weights.size(), 0.0);
    s.m_b.emplace_back(l.bias.size(), 0.0);
    s.v_b.emplace_back(l.bias.size(), 0.0);
  }
  return s;
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m, std::span<double> v,
                 std::uint64_t t, const TrainConfig& config) {
  require(t >= 1, ErrorCode::kInvalidArgument, "adam: step must be >= 1");
  require(grads.size() == params.size() && m.size() == params.size() && v.size() == params.size(),
          ErrorCode::kShapeMismatch, "adam: buffer size mismatch");
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * grads[i];
    v[i] = b2 * v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

void adam_step(Model& model, const Gradients& grads, AdamState& state, const TrainConfig& config) {
  require(config.learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning rate must be > 0");
  if (state.m_w.size() != model.layers.size()) state = AdamState::zeros_like(model);
  ++state.t;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Layer& layer = model.layers[l];
    if (!layer.has_params()) continue;
    adam_update(layer.weights, grads.weights[l], state.m_w[l], state.v_w[l], state.t, config);
    adam_update(layer.bias, grads.bias[l], state.m_b[l], state.v_b[l], state.t, config);
  }
}

TrainResult train(const Model& initial, const FeatureSet& train_set, const FeatureSet& val_set,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  require(config.learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning rate must be > 0");
  require(config.batch_size >= 1, ErrorCode::kInvalidArgument, "batch size must be >= 1");
  check_set(initial, train_set, "training");
  check_set(initial, val_set, "validation");

  TrainResult result;
  result.model = initial;
  Model model = initial;
  AdamState adam = AdamState::zeros_like(model);
  Gradients grads = Gradients::zeros_like(model);
  double best_val = std::numeric_limits<double>::infinity();

  const std::size_t n = train_set.size();
  const std::size_t fs = train_set.feature_size;
  std::vector<std::size_t> order(n);
  std::vector<double> xb;
  std::vector<std::uint16_t> yb;
  std::vector<std::uint64_t> ids;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(config.seed, kShuffleStream, epoch));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0, batch = 0; start < n; start += config.batch_size, ++batch) {
      const std::size_t bs = std::min(config.batch_size, n - start);
      xb.resize(bs * fs);
      yb.resize(bs);
      ids.resize(bs);
      for (std::size_t b = 0; b < bs; ++b) {
        const std::size_t idx = order[start + b];
        std::copy_n(train_set.row(idx), fs, xb.begin() + static_cast<long>(b * fs));
        yb[b] = train_set.labels[idx];
        ids[b] = idx;
      }
      const double loss = batch_gradients(model, xb.data(), yb, Mode::kTrain, config.seed, adam.t, ids, grads);
      if (!std::isfinite(loss))
        fail(ErrorCode::kNonFinite, "non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                        std::to_string(batch) + " (lr " + std::to_string(config.learning_rate) + ")");
      loss_sum += loss * static_cast<double>(bs);
      adam_step(model, grads, adam, config);
    }
    if (!params_finite(model))
      fail(ErrorCode::kNonFinite, "parameters became non-finite during epoch " + std::to_string(epoch));

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n);
    std::tie(stats.val_loss, stats.val_accuracy) = evaluate(model, val_set);
    if (!std::isfinite(stats.val_loss))
      fail(ErrorCode::kNonFinite, "non-finite validation loss at epoch " + std::to_string(epoch));
    if (config.track_train_accuracy) stats.train_accuracy = evaluate(model, train_set).second;
    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      result.model = model;
      result.best_epoch = epoch;
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

TrainResult train(const ModelConfig& model_config, std::size_t num_classes, const FeatureSet& train_set,
                  const FeatureSet& val_set, const TrainConfig& config, const EpochCallback& on_epoch) {
  require(train_set.feature_size % 2 == 0, ErrorCode::kShapeMismatch, "features must be 2 x N");
  const Model initial = build_model(model_config, train_set.feature_size / 2, num_classes, config.seed);
  return train(initial, train_set, val_set, config, on_epoch);
}

std::vector<std::size_t> predict_labels(const Model& model, const FeatureSet& set) {
  std::vector<std::size_t> out(set.size());
  if (set.size() == 0) return out;
  require(set.feature_size == model.input_size(), ErrorCode::kShapeMismatch, "predict: feature size mismatch");
  const std::vector<double> p = predict_proba(model, set.x.data(), set.size());
  const std::size_t k = model.num_classes;
  for (std::size_t e = 0; e < set.size(); ++e) out[e] = argmax(std::span<const double>(p.data() + e * k, k));
  return out;
}

double accuracy(const Model& model, const FeatureSet& set) {
  require(set.size() > 0, ErrorCode::kInvalidArgument, "accuracy of an empty set");
  const auto pred = predict_labels(model, set);
  std::size_t correct = 0;
  for (std::size_t e = 0; e < set.size(); ++e) correct += pred[e] == set.labels[e];
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace specsense::nnet
