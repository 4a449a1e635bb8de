#ifndef INVREP_RUNNER_TRAINER_HPP
#define INVREP_RUNNER_TRAINER_HPP

#include "invrep/data/dataset.hpp"
#include "invrep/interpret.hpp"
#include "invrep/metrics.hpp"
#include "invrep/nn/network.hpp"
#include "invrep/runner/config.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace invrep {

/// Batch means over one epoch. `total == target + lambda * affinity`.
struct EpochLosses {
  double target = 0.0;
  double affinity = 0.0;
  double total = 0.0;
};

/// Called before each epoch; may rewrite training features in place
/// (row count, labels and groups must stay unchanged).
using EpochHook = std::function<void(Dataset& train, std::size_t epoch)>;

struct TrainOutcome {
  Network net;
  std::vector<EpochLosses> epochs;
  std::size_t steps = 0;
  /// Batches in which the affinity term had only one group.
  std::size_t degenerate_batches = 0;
};

/// Minimizes l_target + lambda * l_affinity with mini-batches drawn by
/// cfg.batch. The affinity term is never evaluated when lambda == 0.
/// Fully determined by (cfg, train, seed). Throws TrainingError with the
/// step index when the loss becomes non-finite.
TrainOutcome train_network(const ExperimentConfig& cfg, const Dataset& train, std::uint64_t seed);
TrainOutcome train_network(const ExperimentConfig& cfg, Dataset& train, std::uint64_t seed,
                           const EpochHook& hook);

/// Mixes a run seed into a per-purpose stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<int> predictions;
  /// Binary targets with both groups present only.
  std::optional<FairnessReport> fairness;
  std::optional<ProbeResult> probe;
};

/// Model accuracy (and fairness metrics for binary targets) on `eval`; when
/// `probe_train` is given, also retrains target and sensitive probes on it.
Evaluation evaluate(const Network& net, const Dataset& eval, const Dataset* probe_train,
                    const ProbeSettings& probe_settings);

struct RunReport {
  std::string name;
  std::string recipe;
  std::string mode;  // "train" or a domain adaptation mode
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::string config_json;
  std::vector<EpochLosses> epochs;
  std::string evaluation_split;
  std::size_t train_rows = 0;
  std::size_t eval_rows = 0;
  double accuracy = 0.0;
  std::optional<FairnessReport> fairness;
  std::optional<double> probe_target_accuracy;
  std::optional<double> probe_sensitive_accuracy;
  std::size_t steps = 0;
  std::size_t degenerate_batches = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

}  // namespace invrep

#endif  // INVREP_RUNNER_TRAINER_HPP
