#pragma once

// End-to-end experiment steps shared by the C API and the command-line tool:
// featurize -> split -> train -> evaluate.

#include <filesystem>
#include <functional>
#include <vector>

#include "specsense/dataset.hpp"
#include "specsense/eval.hpp"
#include "specsense/nnet/model.hpp"
#include "specsense/nnet/train.hpp"

namespace specsense::pipeline {

/// Transform + normalize every capture.
nnet::FeatureSet featurize(const dataset::Dataset& ds, Representation repr);

struct TrainOptions {
  Representation representation = Representation::kIq;
  nnet::ModelConfig model = nnet::ModelConfig::desk();
  nnet::TrainConfig train;  // train.seed also seeds the split
  double train_fraction = dataset::kDefaultTrainFraction;
};

struct TrainOutcome {
  nnet::Model model;  // best-validation parameters, rounded to binary32
  std::vector<nnet::EpochStats> history;
  std::size_t best_epoch = 0;
  double test_accuracy = 0.0;
  std::size_t train_count = 0, validation_count = 0, test_count = 0;
};

TrainOutcome train(const dataset::Dataset& ds, const TrainOptions& options,
                   const nnet::EpochCallback& on_epoch = {});

/// epoch,train_loss,val_loss,val_acc
void write_history_csv(const std::vector<nnet::EpochStats>& history, const std::filesystem::path& path);

struct Evaluation {
  eval::ConfusionMatrix confusion;
  eval::MetricsReport report;
};

/// Scores any featurized set.
Evaluation evaluate_set(const nnet::Model& model, const nnet::FeatureSet& set,
                        std::span<const std::int16_t> snr_grid = {});

/// Rebuilds the split recorded in the model and scores its test partition.
Evaluation evaluate(const nnet::Model& model, const dataset::Dataset& ds);

}  // namespace specsense::pipeline
