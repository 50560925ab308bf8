#pragma once

// SPECNN01 model file (little-endian):
//   "SPECNN01", u32 version (= 1), u32 layer_count
//   per layer: u8 kind, u32 ndims, ndims x u32 dims, f32 weights (prod dims),
//              f32 biases (dims[0]; conv and dense only)
//     kind 1 conv SAME x SAME   dims [F, C, kh, kw]
//     kind 2 conv VALID x SAME  dims [F, C, kh, kw]
//     kind 3 dense              dims [out, in]
//     kind 4 relu, 6 flatten, 7 softmax   ndims 0
//     kind 5 dropout            dims [1], the single weight is the drop rate
//   u32 K, u32 ndims, ndims x u32 input shape
//   u8 task, u8 representation, u64 seed, f64 train fraction

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "specsense/nnet/model.hpp"

namespace specsense::nnet {

inline constexpr std::uint32_t kModelVersion = 1;

std::vector<std::uint8_t> serialize_model(const Model& model);
Model deserialize_model(std::span<const std::uint8_t> bytes);

/// Parameters are stored as binary32; save a quantize_f32()'d model for a
/// bit-exact round trip.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace specsense::nnet
