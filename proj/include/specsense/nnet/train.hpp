#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "specsense/nnet/model.hpp"

namespace specsense::nnet {

/// Featurized examples stored back to back (each feature_size values).
struct FeatureSet {
  std::size_t feature_size = 0;
  std::vector<double> x;
  std::vector<std::uint16_t> labels;
  std::vector<std::int16_t> snr_db;

  std::size_t size() const noexcept { return labels.size(); }
  const double* row(std::size_t i) const noexcept { return x.data() + i * feature_size; }
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t epochs = 70;
  std::uint64_t seed = 0;
  // Gradient reduction always uses a fixed shard order, so runs are
  // reproducible either way; the flag is kept for interface symmetry.
  bool deterministic = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool track_train_accuracy = false;  // extra eval-mode pass over the train set per epoch
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double train_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  std::uint64_t t = 0;

  static AdamState zeros_like(const Model& model);
};

/// One bias-corrected Adam update of a parameter block at step t (>= 1).
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m, std::span<double> v,
                 std::uint64_t t, const TrainConfig& config);

/// Increments state.t and updates every parameter of the model.
void adam_step(Model& model, const Gradients& grads, AdamState& state, const TrainConfig& config);

struct TrainResult {
  Model model;  // parameters from the epoch with the lowest validation loss
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
};

using EpochCallback = std::function<void(const EpochStats&)>;

TrainResult train(const Model& initial, const FeatureSet& train_set, const FeatureSet& val_set,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Builds the network from config (initialized from config.seed) and trains it.
TrainResult train(const ModelConfig& model_config, std::size_t num_classes, const FeatureSet& train_set,
                  const FeatureSet& val_set, const TrainConfig& config, const EpochCallback& on_epoch = {});

std::vector<std::size_t> predict_labels(const Model& model, const FeatureSet& set);
double accuracy(const Model& model, const FeatureSet& set);

}  // namespace specsense::nnet
