#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "specsense/dataset.hpp"

using namespace specsense;
using namespace specsense::dataset;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("segmentation") {
  ComplexVector s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
  const auto w = segment(s, 128);
  CHECK(w.size() == 7);
  CHECK(w[1].samples[0].real() == 128.0f);
  CHECK(segment(ComplexVector(384), 128).size() == 3);
  CHECK_THROWS_AS(segment(ComplexVector(10), 128), Error);
}

TEST_CASE("one-hot") {
  const auto v = one_hot(2, 4);
  CHECK(v == std::vector<double>{0, 0, 1, 0});
  CHECK(code_of([] { one_hot(4, 4); }) == ErrorCode::kLabelOutOfRange);
}

TEST_CASE("generation counts, tags and finiteness") {
  const std::vector<std::int16_t> grid{0, 10};
  const auto ds = generate_dataset(Task::kModulation, 1, grid, 7);
  CHECK(ds.size() == 22);
  CHECK(ds.num_classes() == 11);
  std::vector<int> per_class(11, 0);
  for (const auto& ex : ds.examples) {
    ++per_class[ex.label];
    CHECK(ex.capture.size() == 128);
    CHECK(std::find(grid.begin(), grid.end(), ex.snr_db) != grid.end());
    for (auto s : ex.capture.samples) CHECK((std::isfinite(s.real()) && std::isfinite(s.imag())));
  }
  for (int c : per_class) CHECK(c == 2);

  const std::vector<std::int16_t> one{5};
  const auto it = generate_dataset(Task::kInterference, 2, one, 7);
  CHECK(it.size() == 30);
  CHECK(it.class_names.front() == "WIFI_CH0");

  const std::vector<std::int16_t> bad{25};
  CHECK(code_of([&] { generate_dataset(Task::kModulation, 1, bad, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("generation is byte-identical per seed") {
  const std::vector<std::int16_t> grid{-4, 8};
  const auto a = serialize(generate_dataset(Task::kModulation, 2, grid, 99));
  const auto b = serialize(generate_dataset(Task::kModulation, 2, grid, 99));
  const auto c = serialize(generate_dataset(Task::kModulation, 2, grid, 100));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("split partitions the index set") {
  const auto s = split_indices(1000, 0.67, 3);
  CHECK(s.train.size() == 670);
  CHECK(s.validation.size() == 165);
  CHECK(s.test.size() == 165);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 1000);
  CHECK(*all.rbegin() == 999);

  const auto odd = split_indices(10, 0.67, 3);
  CHECK(odd.train.size() == 6);
  CHECK(odd.validation.size() == 2);
  CHECK(odd.test.size() == 2);
  const auto odd2 = split_indices(11, 0.67, 3);
  CHECK(odd2.train.size() == 7);
  CHECK(odd2.validation.size() == 2);
  CHECK(odd2.test.size() == 2);

  CHECK(split_indices(500, 0.67, 8).train == split_indices(500, 0.67, 8).train);
  CHECK(split_indices(500, 0.67, 8).train != split_indices(500, 0.67, 9).train);
  CHECK_THROWS_AS(split_indices(10, 1.0, 1), Error);
}

TEST_CASE("container round trip and corruption") {
  const std::vector<std::int16_t> grid{0};
  const auto ds = generate_dataset(Task::kModulation, 1, grid, 5);
  const auto bytes = serialize(ds);
  const auto back = deserialize(bytes);
  CHECK(back.task == ds.task);
  CHECK(back.class_names == ds.class_names);
  CHECK(back.snr_grid == ds.snr_grid);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.examples[i].label == ds.examples[i].label);
    CHECK(back.examples[i].snr_db == ds.examples[i].snr_db);
    CHECK(back.examples[i].capture.samples == ds.examples[i].capture.samples);
  }
  CHECK(serialize(back) == bytes);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK(code_of([&] { deserialize(bad); }) == ErrorCode::kBadMagic);
  bad = bytes;
  put_u32(bad, 8, 2);
  CHECK(code_of([&] { deserialize(bad); }) == ErrorCode::kVersionMismatch);
  bad.assign(bytes.begin(), bytes.end() - 3);
  CHECK(code_of([&] { deserialize(bad); }) == ErrorCode::kTruncated);
  bad.assign(bytes.begin(), bytes.begin() + 20);
  CHECK(code_of([&] { deserialize(bad); }) == ErrorCode::kTruncated);
  bad = bytes;
  // first record label follows the header: 8 + 4*5 + 2 (one SNR) + names
  std::size_t at = 8 + 20 + 2;
  for (const auto& n : ds.class_names) at += 2 + n.size();
  bad[at] = 11;
  bad[at + 1] = 0;
  CHECK(code_of([&] { deserialize(bad); }) == ErrorCode::kLabelOutOfRange);

  CHECK(code_of([] { load("/nonexistent/dir/x.ds"); }) == ErrorCode::kIo);
}

}  // TEST_SUITE
