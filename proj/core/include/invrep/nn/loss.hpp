#ifndef INVREP_NN_LOSS_HPP
#define INVREP_NN_LOSS_HPP

#include "invrep/nn/tensor.hpp"

#include <span>

namespace invrep {

struct LossResult {
  double loss = 0.0;
  Tensor2 grad_at_output;
};

/// Mean over rows of -log p(label). The returned gradient is (p - onehot) / n,
/// i.e. the gradient w.r.t. the softmax logits, which is what backward()
/// expects for a softmax output layer.
LossResult cross_entropy_loss(const Tensor2& probabilities, std::span<const int> labels);

/// Same loss computed from logits with log-sum-exp, for numerical stability
/// when some probability underflows.
LossResult cross_entropy_from_logits(const Tensor2& logits, std::span<const int> labels);

/// 0.5 * mean over rows of ||output - target||^2, gradient w.r.t. output.
LossResult squared_error_loss(const Tensor2& outputs, const Tensor2& targets);

}  // namespace invrep

#endif  // INVREP_NN_LOSS_HPP
