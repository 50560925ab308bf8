#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace specsense::nnet {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape) noexcept;

/// Dense row-major real tensor.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0);
  Tensor(Shape s, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  std::size_t rank() const noexcept { return shape.size(); }
  /// Flat offset of a full index; checked.
  std::size_t offset(std::initializer_list<std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index) { return data[offset(index)]; }
  double at(std::initializer_list<std::size_t> index) const { return data[offset(index)]; }
  bool all_finite() const noexcept;
};

}  // namespace specsense::nnet
