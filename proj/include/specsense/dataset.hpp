#pragma once

// Capture framing, labelled dataset generation, train/validation/test split
// and the SPECDS01 container.
//
// Container layout (little-endian, floats IEEE-754 binary32):
//   "SPECDS01"                 8 bytes
//   u32 version (= 1)
//   u32 N, u32 K, u32 record_count, u32 snr_count
//   snr_count x i16            SNR grid, dB
//   K x (u16 len, UTF-8 bytes) class names
//   record_count x (u16 label, i16 snr_db, N x (f32 I, f32 Q))

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "specsense/common.hpp"

namespace specsense::dataset {

inline constexpr std::size_t kDefaultCaptureLength = 128;
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr double kDefaultTrainFraction = 0.67;

struct LabeledExample {
  IqVector capture;
  std::uint16_t label = 0;
  std::int16_t snr_db = 0;
};

/// K-vector with a single 1 at `label`.
std::vector<double> one_hot(std::size_t label, std::size_t num_classes);

struct GenerationMeta {
  std::uint64_t seed = 0;
  std::uint32_t per_class_per_snr = 0;
};

struct Dataset {
  Task task = Task::kModulation;
  std::size_t capture_length = kDefaultCaptureLength;
  std::vector<std::string> class_names;
  std::vector<std::int16_t> snr_grid;
  std::vector<LabeledExample> examples;
  GenerationMeta meta;  // in-memory only; the container has no field for it

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t size() const noexcept { return examples.size(); }
};

/// Class inventory in label order: 11 modulations or 15 technology classes.
std::vector<std::string> class_names(Task task);

/// Non-overlapping windows of n samples; the remainder is dropped.
std::vector<IqVector> segment(std::span<const Complex> stream, std::size_t n);

/// K * |snr_grid| * per_class_per_snr examples, ordered by (class, snr, m).
/// Each example has fresh payload and a fresh channel draw; the result is a
/// pure function of the arguments (per-example counter-derived seeds).
Dataset generate_dataset(Task task, std::size_t per_class_per_snr, std::span<const std::int16_t> snr_grid,
                         std::uint64_t seed, std::size_t capture_length = kDefaultCaptureLength);

/// One labelled example as generate_dataset() would produce it for the given
/// example seed.
LabeledExample generate_example(Task task, std::size_t label, std::int16_t snr_db, std::uint64_t example_seed,
                                std::size_t capture_length = kDefaultCaptureLength);

struct SplitIndices {
  std::vector<std::size_t> train, validation, test;
};

/// Seeded permutation; floor(train_fraction * n) train, the rest halved with
/// the odd element going to validation.
SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

struct Split {
  Dataset train, validation, test;
};

Split split(const Dataset& ds, double train_fraction, std::uint64_t seed);

void save(const Dataset& ds, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

/// Serialized container bytes (what save() writes).
std::vector<std::uint8_t> serialize(const Dataset& ds);
Dataset deserialize(std::span<const std::uint8_t> bytes);

}  // namespace specsense::dataset
