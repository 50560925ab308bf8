#include "specsense/nnet/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "specsense/common.hpp"

namespace specsense::nnet {

std::size_t element_count(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(element_count(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  require(data.size() == element_count(shape), ErrorCode::kShapeMismatch, "tensor: data length != product of shape");
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  require(index.size() == shape.size(), ErrorCode::kShapeMismatch, "tensor: index rank mismatch");
  std::size_t off = 0;
  std::size_t d = 0;
  for (std::size_t i : index) {
    require(i < shape[d], ErrorCode::kShapeMismatch, "tensor: index out of range");
    off = off * shape[d] + i;
    ++d;
  }
  return off;
}

bool Tensor::all_finite() const noexcept {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace specsense::nnet
