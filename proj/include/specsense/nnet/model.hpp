#pragma once

// Sequential CNN: conv -> relu -> dropout -> conv -> relu -> dropout ->
// flatten -> dense -> relu -> dropout -> dense -> softmax, plus the batched
// forward/backward engine used by training and prediction.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specsense/common.hpp"
#include "specsense/nnet/layers.hpp"

namespace specsense::nnet {

struct ModelConfig {
  std::size_t conv1_filters = 256;
  std::size_t conv2_filters = 80;
  std::size_t dense_units = 256;
  double dropout = 0.6;

  /// Full-size network (256 / 80 / 256).
  static ModelConfig full();
  /// Laptop-scale network (64 / 32 / 128).
  static ModelConfig desk();
};

/// Provenance carried in the model file so evaluate/predict need no flags.
struct ModelMeta {
  Task task = Task::kModulation;
  Representation representation = Representation::kIq;
  std::uint64_t seed = 0;  // training / split seed
  double train_fraction = 0.67;
};

struct Model {
  Shape input_shape;  // [1, 2, N]
  std::size_t num_classes = 0;
  std::vector<Layer> layers;
  ModelMeta meta;

  std::size_t input_size() const noexcept { return element_count(input_shape); }
  std::size_t param_count() const noexcept;
  /// Shapes after every layer, checked; front() is the input shape.
  std::vector<Shape> shape_chain() const;
  /// Rounds every parameter to binary32 (what the model file stores).
  void quantize_f32();
};

/// Builds the network for 2 x capture_length inputs with fan-based uniform
/// weights (limit sqrt(6 / (fan_in + fan_out))) and zero biases.
Model build_model(const ModelConfig& config, std::size_t capture_length, std::size_t num_classes,
                  std::uint64_t seed);

/// Per-layer gradient buffers, same layout as the parameters.
struct Gradients {
  std::vector<std::vector<double>> weights, bias;

  static Gradients zeros_like(const Model& model);
  void clear();
  void add(const Gradients& other);
  void scale(double s);
  double norm() const;
};

/// Cached activations of one forward pass over a block of examples.
struct Trace {
  std::size_t count = 0;
  std::vector<std::vector<double>> acts;   // acts[0] input, acts[l+1] output of layer l
  std::vector<std::vector<double>> masks;  // dropout multipliers, per layer (empty otherwise)
};

/// Dropout mask key for (seed, step, example, layer): counter-based so masks
/// do not depend on how a batch is sharded across workers.
std::uint64_t dropout_key(std::uint64_t seed, std::uint64_t step, std::uint64_t example, std::size_t layer) noexcept;

/// Forward pass over `count` examples stored back to back in x. In train mode
/// example e uses dropout keys dropout_key(seed, step, example_ids[e], l).
void forward(const Model& model, const double* x, std::size_t count, Mode mode, Trace& trace,
             std::uint64_t seed = 0, std::uint64_t step = 0, std::span<const std::uint64_t> example_ids = {});

/// Accumulates d(loss_scale * sum_e CE_e)/d(theta) into grads, reusing the
/// trace's dropout masks. Returns the unscaled summed cross-entropy.
double backward(const Model& model, const Trace& trace, std::span<const std::uint16_t> labels, double loss_scale,
                Gradients& grads);

/// Mean cross-entropy and gradients of a batch (fixed four-way sharding with
/// shard-ordered reduction, so the result is independent of worker count).
double batch_gradients(const Model& model, const double* x, std::span<const std::uint16_t> labels, Mode mode,
                       std::uint64_t seed, std::uint64_t step, std::span<const std::uint64_t> example_ids,
                       Gradients& grads);

/// Mean cross-entropy of a batch without gradients (eval mode).
double batch_loss(const Model& model, const double* x, std::span<const std::uint16_t> labels);

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

/// Softmax outputs for count examples, row-major [count, K]. Parallel.
std::vector<double> predict_proba(const Model& model, const double* x, std::size_t count);

/// Argmax (ties -> lowest index) and class probabilities for one input.
Prediction predict(const Model& model, std::span<const double> x);

std::size_t argmax(std::span<const double> v) noexcept;

}  // namespace specsense::nnet
