#ifndef INVREP_NN_OPTIMIZER_HPP
#define INVREP_NN_OPTIMIZER_HPP

#include "invrep/nn/network.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace invrep {

enum class OptimizerKind { sgd, adam };

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Stateful first-order optimizer. Adam moments are allocated lazily on the
/// first step and must keep the same shapes afterwards.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSettings settings);

  /// Applies one update. Throws TrainingError (carrying the step index) on a
  /// non-finite gradient, leaving parameters untouched.
  void step(std::span<DenseLayer> layers, const GradientSet& grads);

  std::size_t steps_taken() const { return steps_; }
  const OptimizerSettings& settings() const { return settings_; }

 private:
  OptimizerSettings settings_;
  std::size_t steps_ = 0;
  std::optional<GradientSet> first_moment_;
  std::optional<GradientSet> second_moment_;
};

void apply_update(Network& net, const GradientSet& grads, Optimizer& opt);

}  // namespace invrep

#endif  // INVREP_NN_OPTIMIZER_HPP
