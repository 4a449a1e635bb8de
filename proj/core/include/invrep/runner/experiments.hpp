#ifndef INVREP_RUNNER_EXPERIMENTS_HPP
#define INVREP_RUNNER_EXPERIMENTS_HPP

#include "invrep/interpret.hpp"
#include "invrep/metrics.hpp"
#include "invrep/runner/config.hpp"
#include "invrep/runner/recipes.hpp"
#include "invrep/runner/trainer.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invrep {

struct RunOutcome {
  Network net;
  RunReport report;
};

/// Trains one seed of a fairness recipe and evaluates it on
/// cfg.evaluation_split, with probes retrained on the train split.
RunOutcome run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          const PreparedData& data);

/// Evaluation of an existing network, reported in the same shape as a run.
RunReport evaluate_network(const ExperimentConfig& cfg, const Network& net,
                           const PreparedData& data);

enum class SweepAxis { lambda, rep_width };
std::string_view sweep_axis_name(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view name);

/// `cfg` with one sweep value applied (lambda, or the width of the
/// representation layer).
ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for n < 2
  std::size_t n = 0;
};
Summary summarize(std::span<const double> values);

struct SweepCell {
  double value = 0.0;
  std::vector<RunReport> runs;
  /// "seed=<s>: <message>" for every failed run; the sweep carries on.
  std::vector<std::string> errors;

  Summary accuracy() const;
  Summary probe_target() const;
  Summary probe_sensitive() const;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::lambda;
  std::vector<SweepCell> cells;
};

using Progress = std::function<void(const std::string&)>;

/// One run per (value, seed in cfg.seeds).
SweepTable sweep(const ExperimentConfig& cfg, SweepAxis axis, std::span<const double> values,
                 const PreparedData& data, const Progress& progress = {});

enum class AdaptMode { source_only, augmentation_baseline, source_plus_augmentation, affinity };
std::string_view adapt_mode_name(AdaptMode m);
AdaptMode parse_adapt_mode(std::string_view name);

/// Few-shot adaptation to the rotated domain. cfg.data.target_samples labeled
/// target rows are drawn class-balanced from `data.target_pool`.
///
///   source_only               source rows only, lambda ignored
///   augmentation_baseline     target rows only, every copy re-rotated uniformly
///                             in +-augment_degrees each epoch, no affinity
///   source_plus_augmentation  source rows plus the augmented target rows
///   affinity                  source (z=0) + target (z=1) with the affinity loss
///
/// With balance_domains the target rows are repeated to match the source
/// count (so every mode takes the same number of steps per epoch). Zero target
/// rows fall back to source_only with a warning. Accuracy is measured on
/// `data.target_test`.
RunOutcome run_domain_adaptation(const ExperimentConfig& cfg, AdaptMode mode,
                                 std::uint64_t seed, const DomainData& data);

/// The Adult fairness study: baselines with and without z, the fair model,
/// and z reattached to the fair representation.
struct AdultStudy {
  FairnessReport baseline_without_z;
  FairnessReport baseline_with_z;
  FairnessReport fair;
  ProbeResult fair_probe;
  ReattachmentResult fair_head;   // include_z = false
  ReattachmentResult reattached;  // include_z = true
  InfluenceReport influence;
  HistogramPair r_histogram;
  Network fair_net;
};

/// `without_z` / `with_z` are the Adult recipe prepared with exclude_z true and
/// false. The baselines use lambda = 0; the fair model uses cfg.affinity.lambda.
AdultStudy run_adult_study(const ExperimentConfig& cfg, std::uint64_t seed,
                           const PreparedData& without_z, const PreparedData& with_z);

}  // namespace invrep

#endif  // INVREP_RUNNER_EXPERIMENTS_HPP
