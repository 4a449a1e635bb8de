#include "invrep/runner/trainer.hpp"

#include "invrep/affinity.hpp"
#include "invrep/error.hpp"
#include "invrep/nn/loss.hpp"
#include "invrep/nn/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace invrep {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

TrainOutcome train_impl(const ExperimentConfig& cfg, const Dataset& train, std::uint64_t seed,
                        const std::function<void(std::size_t)>& before_epoch) {
  cfg.validate();
  train.validate();
  const int classes = train.num_classes();
  if (classes < 2) throw InputError("training data needs at least two classes");

  TrainOutcome out{init_network(cfg.architecture(static_cast<std::size_t>(train.width()),
                                                 static_cast<std::size_t>(classes)),
                                seed),
                   {}, 0, 0};
  Network& net = out.net;
  Optimizer opt(cfg.optimizer);
  BatchSampler sampler = cfg.batch;
  sampler.seed = derive_seed(seed, cfg.batch.seed);
  const double lambda = cfg.affinity.lambda;
  const std::size_t rep = net.representation_index();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (before_epoch) before_epoch(epoch);
    const auto batches = epoch_batches(train.groups, sampler, epoch);
    EpochLosses sums;
    for (const auto& rows : batches) {
      const Tensor2 x = train.gather_features(rows);
      const std::vector<int> y = train.gather_targets(rows);
      const ForwardTrace trace = forward(net, x);
      const LossResult ce = cross_entropy_from_logits(trace.logits(), y);

      double aff = 0.0;
      GradientSet grads;
      if (lambda > 0.0) {
        const std::vector<int> z = train.gather_groups(rows);
        const AffinityResult a =
            affinity_loss(GroupedBatch{trace.activations[rep], y, z}, cfg.affinity);
        if (a.degenerate) ++out.degenerate_batches;
        aff = a.loss;
        grads = backward_combined(net, trace, ce.grad_at_output,
                                  lambda * a.grad_at_representation);
      } else {
        grads = backward(net, trace, ce.grad_at_output);
      }
      const double total = lambda > 0.0 ? ce.loss + lambda * aff : ce.loss;
      if (!std::isfinite(total)) {
        throw TrainingError("non-finite loss at step " + std::to_string(out.steps), out.steps);
      }
      apply_update(net, grads, opt);
      ++out.steps;
      sums.target += ce.loss;
      sums.affinity += aff;
    }
    const auto nb = static_cast<double>(batches.size());
    EpochLosses e{sums.target / nb, sums.affinity / nb, 0.0};
    e.total = e.target + lambda * e.affinity;
    out.epochs.push_back(e);
  }
  return out;
}

}  // namespace

TrainOutcome train_network(const ExperimentConfig& cfg, const Dataset& train, std::uint64_t seed) {
  return train_impl(cfg, train, seed, {});
}

TrainOutcome train_network(const ExperimentConfig& cfg, Dataset& train, std::uint64_t seed,
                           const EpochHook& hook) {
  if (!hook) return train_impl(cfg, train, seed, {});
  return train_impl(cfg, train, seed, [&](std::size_t epoch) { hook(train, epoch); });
}

namespace {

bool both_groups(const Dataset& ds) {
  if (!ds.has_groups) return false;
  const auto ones = std::count(ds.groups.begin(), ds.groups.end(), 1);
  return ones > 0 && static_cast<std::size_t>(ones) < ds.size();
}

}  // namespace

Evaluation evaluate(const Network& net, const Dataset& eval, const Dataset* probe_train,
                    const ProbeSettings& probe_settings) {
  eval.validate();
  if (eval.size() == 0) throw InputError("evaluation data is empty");
  Evaluation out;
  const Tensor2 probs = predict_output(net, eval.features);
  out.predictions.resize(eval.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < eval.size(); ++i) {
    Eigen::Index arg = 0;
    probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    out.predictions[i] = static_cast<int>(arg);
    correct += out.predictions[i] == eval.targets[i] ? 1 : 0;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(eval.size());

  if (net.output_width() == 2 && both_groups(eval)) {
    out.fairness = fairness_report({out.predictions, eval.targets, eval.groups});
  }
  if (probe_train != nullptr && both_groups(*probe_train) && both_groups(eval)) {
    out.probe = probe_representation(net, *probe_train, eval, probe_settings);
  }
  return out;
}

}  // namespace invrep
