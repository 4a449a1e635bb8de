#include "invrep/nn/loss.hpp"

#include "invrep/error.hpp"

#include <cmath>
#include <string>

namespace invrep {

namespace {

void check_labels(const Tensor2& outputs, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != outputs.rows()) {
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match batch rows " + std::to_string(outputs.rows()));
  }
  if (outputs.rows() == 0) throw InputError("cross entropy on an empty batch");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= outputs.cols()) {
      throw InputError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                       " is outside [0, " + std::to_string(outputs.cols()) + ")");
    }
  }
}

}  // namespace

LossResult cross_entropy_loss(const Tensor2& probabilities, std::span<const int> labels) {
  check_labels(probabilities, labels);
  const auto n = static_cast<double>(probabilities.rows());
  LossResult r;
  r.grad_at_output = probabilities / n;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    sum -= std::log(probabilities(i, y));
    r.grad_at_output(i, y) -= 1.0 / n;
  }
  r.loss = sum / n;
  return r;
}

LossResult cross_entropy_from_logits(const Tensor2& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  const auto n = static_cast<double>(logits.rows());
  LossResult r;
  r.grad_at_output.resize(logits.rows(), logits.cols());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const double m = logits.row(i).maxCoeff();
    auto shifted = (logits.row(i).array() - m).eval();
    const double lse = std::log(shifted.exp().sum());
    sum += lse - shifted(y);
    r.grad_at_output.row(i) = ((shifted - lse).exp() / n).matrix();
    r.grad_at_output(i, y) -= 1.0 / n;
  }
  r.loss = sum / n;
  return r;
}

LossResult squared_error_loss(const Tensor2& outputs, const Tensor2& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols()) {
    throw InputError("squared error: output and target shapes differ");
  }
  if (outputs.rows() == 0) throw InputError("squared error on an empty batch");
  const auto n = static_cast<double>(outputs.rows());
  LossResult r;
  r.grad_at_output = (outputs - targets) / n;
  r.loss = 0.5 * (outputs - targets).squaredNorm() / n;
  return r;
}

}  // namespace invrep
