#include "specsense/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "byteio.hpp"
#include "specsense/channel.hpp"
#include "specsense/sigsynth.hpp"

namespace specsense::dataset {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'E', 'C', 'D', 'S', '0', '1'};

// The synthesized stream is three captures long; the impairments run over the
// whole stream and the middle window is kept, so filter and fading transients
// never reach the capture.
constexpr std::size_t kStreamCaptures = 3;

enum SeedStream : std::uint64_t { kExampleStream = 11, kSourceStream = 1, kChannelStream = 2, kImpairStream = 3,
                                  kNoiseStream = 4, kSplitStream = 21 };

Task task_for_classes(const std::vector<std::string>& names) {
  if (names == class_names(Task::kModulation)) return Task::kModulation;
  if (names == class_names(Task::kInterference)) return Task::kInterference;
  fail(ErrorCode::kUnsupported, "dataset container: unrecognized class inventory");
}

}  // namespace

std::vector<double> one_hot(std::size_t label, std::size_t num_classes) {
  require(label < num_classes, ErrorCode::kLabelOutOfRange, "one_hot: label out of range");
  std::vector<double> v(num_classes, 0.0);
  v[label] = 1.0;
  return v;
}

std::vector<std::string> class_names(Task task) {
  std::vector<std::string> names;
  if (task == Task::kModulation) {
    for (auto m : sigsynth::kAllModulations) names.emplace_back(sigsynth::name(m));
  } else {
    for (const auto& info : sigsynth::technology_classes()) names.emplace_back(info.name);
  }
  return names;
}

std::vector<IqVector> segment(std::span<const Complex> stream, std::size_t n) {
  require(n > 0, ErrorCode::kInvalidArgument, "segment: window length must be positive");
  require(stream.size() >= n, ErrorCode::kInvalidArgument,
          "segment: stream of " + std::to_string(stream.size()) + " samples is shorter than " + std::to_string(n));
  std::vector<IqVector> out;
  for (std::size_t start = 0; start + n <= stream.size(); start += n) {
    ComplexVector window(stream.begin() + static_cast<long>(start), stream.begin() + static_cast<long>(start + n));
    out.push_back(IqVector::from_complex(window));
  }
  return out;
}

LabeledExample generate_example(Task task, std::size_t label, std::int16_t snr_db, std::uint64_t example_seed,
                                std::size_t capture_length) {
  const std::size_t stream_len = kStreamCaptures * capture_length;
  ComplexVector clean;
  channel::ChannelParams params;
  Rng channel_rng(mix_seed(example_seed, kChannelStream));
  if (task == Task::kModulation) {
    require(label < sigsynth::kAllModulations.size(), ErrorCode::kLabelOutOfRange, "modulation label out of range");
    clean = sigsynth::synthesize_modulation(sigsynth::kAllModulations[label], stream_len,
                                            mix_seed(example_seed, kSourceStream))
                .samples;
    params = channel::draw_rich(snr_db, sigsynth::kModulationSampleRate, channel_rng);
  } else {
    const auto classes = sigsynth::technology_classes();
    require(label < classes.size(), ErrorCode::kLabelOutOfRange, "technology label out of range");
    clean = sigsynth::synthesize_technology(classes[label].cls, stream_len, mix_seed(example_seed, kSourceStream))
                .samples;
    params = channel::draw_flat(snr_db, sigsynth::kTechnologySampleRate, channel_rng);
  }
  const ComplexVector impaired = channel::apply_impairments(clean, params, mix_seed(example_seed, kImpairStream));
  const std::vector<IqVector> windows = segment(impaired, capture_length);
  // AWGN is applied last, on the kept window, so the SNR tag is exact.
  const ComplexVector middle = windows[1].to_complex();
  LabeledExample ex;
  ex.capture = IqVector::from_complex(channel::apply_awgn(middle, snr_db, mix_seed(example_seed, kNoiseStream)));
  ex.label = static_cast<std::uint16_t>(label);
  ex.snr_db = snr_db;
  return ex;
}

Dataset generate_dataset(Task task, std::size_t per_class_per_snr, std::span<const std::int16_t> snr_grid,
                         std::uint64_t seed, std::size_t capture_length) {
  require(per_class_per_snr >= 1, ErrorCode::kInvalidArgument, "generate_dataset: per-class count must be >= 1");
  require(!snr_grid.empty(), ErrorCode::kInvalidArgument, "generate_dataset: empty SNR grid");
  require(capture_length >= 2, ErrorCode::kInvalidArgument, "generate_dataset: capture length must be >= 2");
  for (std::int16_t s : snr_grid)
    require(s >= -20 && s <= 20, ErrorCode::kInvalidArgument,
            "generate_dataset: SNR " + std::to_string(s) + " dB outside [-20, 20]");

  Dataset ds;
  ds.task = task;
  ds.capture_length = capture_length;
  ds.class_names = class_names(task);
  ds.snr_grid.assign(snr_grid.begin(), snr_grid.end());
  ds.meta = {seed, static_cast<std::uint32_t>(per_class_per_snr)};
  const std::size_t k = ds.class_names.size();
  const std::size_t per_class = snr_grid.size() * per_class_per_snr;
  ds.examples.resize(k * per_class);
  parallel_for(ds.examples.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const std::size_t label = e / per_class;
      const std::size_t snr_index = (e % per_class) / per_class_per_snr;
      ds.examples[e] = generate_example(task, label, snr_grid[snr_index], mix_seed(seed, kExampleStream, e),
                                        capture_length);
    }
  });
  return ds;
}

SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  require(n > 0, ErrorCode::kInvalidArgument, "split: dataset is empty");
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::kInvalidArgument,
          "split: train fraction must be in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, kSplitStream));
  // Explicit Fisher-Yates: std::shuffle's exact draw sequence is not specified.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
  const std::size_t rest = n - n_train;
  const std::size_t n_val = (rest + 1) / 2;
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  s.validation.assign(order.begin() + static_cast<long>(n_train),
                      order.begin() + static_cast<long>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
  return s;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.task = ds.task;
  out.capture_length = ds.capture_length;
  out.class_names = ds.class_names;
  out.snr_grid = ds.snr_grid;
  out.meta = ds.meta;
  out.examples.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < ds.examples.size(), ErrorCode::kInvalidArgument, "subset: index out of range");
    out.examples.push_back(ds.examples[i]);
  }
  return out;
}

Split split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  const SplitIndices idx = split_indices(ds.size(), train_fraction, seed);
  return {subset(ds, idx.train), subset(ds, idx.validation), subset(ds, idx.test)};
}

std::vector<std::uint8_t> serialize(const Dataset& ds) {
  const std::size_t k = ds.num_classes();
  require(k > 0 && k <= 0xffff, ErrorCode::kInvalidArgument, "save: class count must be in [1, 65535]");
  detail::ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(ds.capture_length));
  w.u32(static_cast<std::uint32_t>(k));
  w.u32(static_cast<std::uint32_t>(ds.examples.size()));
  w.u32(static_cast<std::uint32_t>(ds.snr_grid.size()));
  for (std::int16_t s : ds.snr_grid) w.i16(s);
  for (const auto& name : ds.class_names) {
    require(name.size() <= 0xffff, ErrorCode::kInvalidArgument, "save: class name too long");
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.raw(name.data(), name.size());
  }
  for (const auto& ex : ds.examples) {
    require(ex.label < k, ErrorCode::kLabelOutOfRange, "save: label out of range");
    require(ex.capture.size() == ds.capture_length, ErrorCode::kShapeMismatch, "save: capture length mismatch");
    w.u16(ex.label);
    w.i16(ex.snr_db);
    for (const auto& s : ex.capture.samples) {
      w.f32(s.real());
      w.f32(s.imag());
    }
  }
  return w.take();
}

Dataset deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "dataset container");
  if (!r.has(sizeof kMagic) || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorCode::kBadMagic, "dataset container: bad magic (expected SPECDS01)");
  r.raw(sizeof kMagic, "magic");
  const std::uint32_t version = r.u32("version");
  if (version != kContainerVersion)
    fail(ErrorCode::kVersionMismatch, "dataset container: unsupported version " + std::to_string(version));
  Dataset ds;
  ds.capture_length = r.u32("N");
  const std::uint32_t k = r.u32("K");
  const std::uint32_t count = r.u32("record count");
  const std::uint32_t snr_count = r.u32("SNR count");
  for (std::uint32_t i = 0; i < snr_count; ++i) ds.snr_grid.push_back(r.i16("SNR grid"));
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint16_t len = r.u16("class name length");
    const auto name = r.raw(len, "class name");
    ds.class_names.emplace_back(name.begin(), name.end());
  }
  ds.task = task_for_classes(ds.class_names);
  const std::size_t record_bytes = 4 + 8 * ds.capture_length;
  if (r.remaining() != static_cast<std::size_t>(count) * record_bytes)
    fail(ErrorCode::kTruncated, "dataset container: header declares " + std::to_string(count) + " records but " +
                                    std::to_string(r.remaining()) + " payload bytes follow");
  ds.examples.resize(count);
  for (auto& ex : ds.examples) {
    ex.label = r.u16("label");
    if (ex.label >= k)
      fail(ErrorCode::kLabelOutOfRange, "dataset container: label " + std::to_string(ex.label) +
                                            " >= K=" + std::to_string(k));
    ex.snr_db = r.i16("snr");
    ex.capture.samples.resize(ds.capture_length);
    for (auto& s : ex.capture.samples) {
      const float i = r.f32("I");
      const float q = r.f32("Q");
      s = {i, q};
    }
  }
  return ds;
}

void save(const Dataset& ds, const std::filesystem::path& path) { detail::write_file(path.string(), serialize(ds)); }

Dataset load(const std::filesystem::path& path) { return deserialize(detail::read_file(path.string())); }

}  // namespace specsense::dataset
