#pragma once

// Confusion matrices, per-class and prevalence-weighted metrics, per-SNR
// accuracy and the report files.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "specsense/nnet/model.hpp"
#include "specsense/nnet/train.hpp"

namespace specsense::eval {

struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::uint64_t> counts;  // row = true class, column = predicted

  std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts[truth * num_classes + pred]; }
  std::uint64_t total() const noexcept;
};

ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> truths,
                          std::size_t num_classes);

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::uint64_t support = 0;  // true-class count
};

struct SnrAccuracy {
  int snr_db = 0;
  std::uint64_t count = 0;
  double accuracy = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double precision_avg = 0.0, recall_avg = 0.0, f1_avg = 0.0;  // weighted by true-class prevalence
  double accuracy = 0.0;
  std::vector<SnrAccuracy> per_snr;
  std::vector<std::string> notes;  // zero-denominator footnotes, empty-bucket warnings
};

/// Standard precision/recall/F1 per class; a zero denominator scores 0 and
/// adds a note. Throws on an all-zero matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Accuracy per SNR tag, ascending. Grid points with no examples are skipped
/// and reported through `warnings` when given.
std::vector<SnrAccuracy> per_snr_accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> truths,
                                          std::span<const std::int16_t> snr_db,
                                          std::span<const std::int16_t> grid = {},
                                          std::vector<std::string>* warnings = nullptr);

std::vector<SnrAccuracy> per_snr_accuracy(const nnet::Model& model, const nnet::FeatureSet& test_set);

/// Writes confusion.csv, per_snr.csv, summary.txt and curve.svg into dir
/// (created if missing). Output is a pure function of the inputs.
void emit_report(const MetricsReport& report, const ConfusionMatrix& cm, std::span<const std::string> class_names,
                 const std::filesystem::path& dir);

/// Parses a confusion.csv written by emit_report().
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

}  // namespace specsense::eval
