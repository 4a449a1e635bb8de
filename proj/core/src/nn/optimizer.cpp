#include "invrep/nn/optimizer.hpp"

#include "invrep/error.hpp"

#include <cmath>
#include <string>

namespace invrep {

std::string_view optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerSettings::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive and finite");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
}

Optimizer::Optimizer(OptimizerSettings settings) : settings_(settings) {
  settings_.validate();
}

void Optimizer::step(std::span<DenseLayer> layers, const GradientSet& grads) {
  if (grads.weights.size() != layers.size()) {
    throw ConfigError("gradient set has " + std::to_string(grads.weights.size()) +
                      " layers, network has " + std::to_string(layers.size()));
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (grads.weights[i].rows() != layers[i].weights.rows() ||
        grads.weights[i].cols() != layers[i].weights.cols() ||
        grads.biases[i].size() != layers[i].bias.size()) {
      throw ConfigError("layer " + std::to_string(i) + ": gradient shape mismatch");
    }
  }
  if (!grads.all_finite()) {
    throw TrainingError("non-finite gradient at step " + std::to_string(steps_), steps_);
  }

  const double lr = settings_.learning_rate;
  if (settings_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      layers[i].weights -= lr * grads.weights[i];
      layers[i].bias -= lr * grads.biases[i];
    }
    ++steps_;
    return;
  }

  if (!first_moment_) {
    first_moment_ = GradientSet::zeros_like(layers);
    second_moment_ = GradientSet::zeros_like(layers);
  }
  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double t = static_cast<double>(steps_ + 1);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  const double eps = settings_.epsilon;

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weights, first_moment_->weights[i], second_moment_->weights[i],
           grads.weights[i]);
    update(layers[i].bias, first_moment_->biases[i], second_moment_->biases[i],
           grads.biases[i]);
  }
  ++steps_;
}

void apply_update(Network& net, const GradientSet& grads, Optimizer& opt) {
  opt.step(net.mutable_layers(), grads);
}

}  // namespace invrep
