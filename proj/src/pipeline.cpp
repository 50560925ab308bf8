#include "specsense/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "specsense/transforms.hpp"

namespace specsense::pipeline {

nnet::FeatureSet featurize(const dataset::Dataset& ds, Representation repr) {
  nnet::FeatureSet fs;
  fs.feature_size = 2 * ds.capture_length;
  fs.x.resize(ds.size() * fs.feature_size);
  fs.labels.resize(ds.size());
  fs.snr_db.resize(ds.size());
  parallel_for(ds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& ex = ds.examples[i];
      require(ex.capture.size() == ds.capture_length, ErrorCode::kShapeMismatch, "capture length mismatch");
      const transforms::FeatureVector f = transforms::featurize(ex.capture, repr);
      std::copy(f.data.begin(), f.data.end(), fs.x.begin() + static_cast<long>(i * fs.feature_size));
      fs.labels[i] = ex.label;
      fs.snr_db[i] = ex.snr_db;
    }
  });
  return fs;
}

TrainOutcome train(const dataset::Dataset& ds, const TrainOptions& options, const nnet::EpochCallback& on_epoch) {
  const dataset::Split parts = dataset::split(ds, options.train_fraction, options.train.seed);
  require(parts.train.size() > 0 && parts.validation.size() > 0 && parts.test.size() > 0,
          ErrorCode::kInvalidArgument, "dataset too small to split into train/validation/test");
  const nnet::FeatureSet train_set = featurize(parts.train, options.representation);
  const nnet::FeatureSet val_set = featurize(parts.validation, options.representation);
  const nnet::FeatureSet test_set = featurize(parts.test, options.representation);

  nnet::Model initial = nnet::build_model(options.model, ds.capture_length, ds.num_classes(), options.train.seed);
  initial.meta = {ds.task, options.representation, options.train.seed, options.train_fraction};
  nnet::TrainResult result = nnet::train(initial, train_set, val_set, options.train, on_epoch);

  TrainOutcome out;
  out.model = std::move(result.model);
  out.model.quantize_f32();  // what gets saved is what gets scored
  out.history = std::move(result.history);
  out.best_epoch = result.best_epoch;
  out.test_accuracy = nnet::accuracy(out.model, test_set);
  out.train_count = train_set.size();
  out.validation_count = val_set.size();
  out.test_count = test_set.size();
  return out;
}

void write_history_csv(const std::vector<nnet::EpochStats>& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << "epoch,train_loss,val_loss,val_acc\n";
  char buf[128];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_loss, e.val_accuracy);
    out << buf;
  }
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

Evaluation evaluate_set(const nnet::Model& model, const nnet::FeatureSet& set, std::span<const std::int16_t> snr_grid) {
  require(set.size() > 0, ErrorCode::kInvalidArgument, "nothing to evaluate");
  const std::vector<std::size_t> preds = nnet::predict_labels(model, set);
  const std::vector<std::size_t> truths(set.labels.begin(), set.labels.end());
  Evaluation ev;
  ev.confusion = eval::confusion(preds, truths, model.num_classes);
  ev.report = eval::metrics(ev.confusion);
  ev.report.per_snr = eval::per_snr_accuracy(preds, truths, set.snr_db, snr_grid, &ev.report.notes);
  return ev;
}

Evaluation evaluate(const nnet::Model& model, const dataset::Dataset& ds) {
  require(model.num_classes == ds.num_classes(), ErrorCode::kShapeMismatch,
          "model has K=" + std::to_string(model.num_classes) + " classes, dataset has K=" +
              std::to_string(ds.num_classes()));
  require(model.meta.task == ds.task, ErrorCode::kShapeMismatch,
          std::string("model was trained for the ") + std::string(to_string(model.meta.task)) +
              " task, dataset is " + std::string(to_string(ds.task)));
  require(model.input_size() == 2 * ds.capture_length, ErrorCode::kShapeMismatch,
          "model input length does not match dataset capture length");
  const dataset::SplitIndices idx = dataset::split_indices(ds.size(), model.meta.train_fraction, model.meta.seed);
  const dataset::Dataset test = dataset::subset(ds, idx.test);
  require(test.size() > 0, ErrorCode::kInvalidArgument, "test partition is empty");
  return evaluate_set(model, featurize(test, model.meta.representation), ds.snr_grid);
}

}  // namespace specsense::pipeline
