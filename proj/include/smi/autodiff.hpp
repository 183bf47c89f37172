#pragma once

#include <functional>
#include <vector>

#include "smi/sinc.hpp"
#include "smi/tensor.hpp"

namespace smi {

// Reverse-mode tape covering exactly the ops the speaker net needs.
// Values are computed eagerly when an op is recorded; backward() replays the
// recorded closures in reverse creation order. Gradients flow only through
// nodes that require them, so attack-time input gradients skip the parameter
// gradient work entirely. Gradients of param() leaves are accumulated into
// the bound tensor's grad buffer.
class Tape {
 public:
  using Id = int32_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // leaves
  Id constant(Tensor v);   // no gradient tracked
  Id input(Tensor v);      // gradient readable via grad()
  Id param(Tensor& t);     // gradient accumulated into t.grad on backward()

  const Tensor& value(Id id) const;
  double scalar_value(Id id) const;
  const std::vector<double>& grad(Id id) const;  // valid after backward()

  // Seeds d(root)/d(root) = seed and propagates; root must be a scalar.
  void backward(Id root, double seed = 1.0);

  // ops
  Id sinc_filter_bank(Id a, Id b, const SincBankSpec& spec);   // (F),(F) -> (F,K)
  Id conv1d(Id x, Id w, Id bias);        // (Cin,T),(Cout,Cin,K),(Cout) -> (Cout,T-K+1)
  Id maxpool1d(Id x, int64_t factor);    // (C,T) -> (C,floor(T/factor))
  Id layer_norm(Id x, Id gain, Id bias, double eps);  // (C,T), affine per channel
  Id leaky_relu(Id x, double slope);
  Id reshape(Id x, std::vector<int64_t> shape);
  Id dense(Id x, Id w, Id b);            // (n),(m,n),(m) -> (m)
  Id softmax(Id x);                      // (n) -> (n)
  Id pick(Id x, int64_t index);          // (n) -> scalar
  Id affine(Id x, double mul, double add);  // scalar -> scalar
  Id cross_entropy_logits(Id logits, int64_t label);  // (n) -> scalar, stable

 private:
  struct Node {
    Tensor val;
    std::vector<double> grad;
    bool requires_grad = false;
    Tensor* bound = nullptr;
    std::function<void(Tape&)> back;
  };

  Id push(Tensor val, bool requires, std::function<void(Tape&)> back);
  Node& node(Id id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(Id id) const { return nodes_[static_cast<size_t>(id)]; }
  bool wants(Id id) const { return node(id).requires_grad; }
  std::vector<double>& gbuf(Id id) { return node(id).grad; }

  std::vector<Node> nodes_;
};

}  // namespace smi
