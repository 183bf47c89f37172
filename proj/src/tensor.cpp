#include "smi/tensor.hpp"

#include "smi/errors.hpp"

namespace smi {

int64_t shape_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d <= 0) throw InvalidInputError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int64_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (shape_numel(shape) != numel())
    throw InvalidInputError("tensor data length does not match shape");
}

Tensor Tensor::zeros(std::vector<int64_t> s) {
  int64_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(static_cast<size_t>(n), 0.0));
}

Tensor Tensor::full(std::vector<int64_t> s, double v) {
  int64_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(static_cast<size_t>(n), v));
}

void Tensor::ensure_grad() {
  if (!grad) grad.emplace(data.size(), 0.0);
}

void Tensor::zero_grad() {
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
}

}  // namespace smi
