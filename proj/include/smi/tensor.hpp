#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace smi {

int64_t shape_numel(const std::vector<int64_t>& shape);

// Dense row-major tensor of doubles with an optional same-shape gradient
// buffer. Value-semantic; all layers and checkpoints speak this type.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;
  std::optional<std::vector<double>> grad;

  Tensor() = default;
  Tensor(std::vector<int64_t> s, std::vector<double> d);

  static Tensor zeros(std::vector<int64_t> s);
  static Tensor full(std::vector<int64_t> s, double v);

  int64_t numel() const { return static_cast<int64_t>(data.size()); }

  void ensure_grad();
  void zero_grad();
};

}  // namespace smi
