#ifndef INVREP_INTERPRET_HPP
#define INVREP_INTERPRET_HPP

#include "invrep/data/dataset.hpp"
#include "invrep/metrics.hpp"
#include "invrep/nn/network.hpp"
#include "invrep/nn/optimizer.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace invrep {

enum class ProbeObjective { predict_target, predict_sensitive };

struct ProbeSettings {
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  OptimizerSettings optimizer{};
  std::uint64_t seed = 0;
};

/// A freshly trained softmax head on frozen features.
struct ProbeOutcome {
  double accuracy = 0.0;
  DenseLayer head;
  std::vector<int> predictions;  // on the evaluation data
};

struct ProbeResult {
  double target_accuracy = 0.0;
  double sensitive_accuracy = 0.0;
  DenseLayer target_head;
  DenseLayer sensitive_head;
  std::vector<int> target_predictions;
  std::vector<int> sensitive_predictions;
};

/// Trains a softmax layer on `features` with mini-batch cross-entropy.
/// InputError if fewer than two distinct labels are present.
DenseLayer train_softmax_head(const Tensor2& features, std::span<const int> labels,
                              int num_classes, const ProbeSettings& settings);

std::vector<int> predict_classes(const DenseLayer& head, const Tensor2& features);

/// Freezes `net` below and including the representation layer, trains a new
/// output layer on `train` for the chosen objective and reports accuracy on
/// `eval`. The network itself is never modified.
ProbeOutcome probe(const Network& frozen, const Dataset& train, const Dataset& eval,
                   ProbeObjective objective, const ProbeSettings& settings);

/// Both probes (target and sensitive) on one frozen representation.
ProbeResult probe_representation(const Network& frozen, const Dataset& train,
                                 const Dataset& eval, const ProbeSettings& settings);

enum class Transfer { linear, sigmoid };

std::string_view transfer_name(Transfer t);
Transfer parse_transfer(std::string_view name);

/// y_hat = f(w_r * r + w_z * z + b) with r = projector . g(x) + projector_bias,
/// a one-dimensional summary of the frozen fair representation.
struct ReattachedHead {
  RowVector projector;
  double projector_bias = 0.0;
  double w_r = 0.0;
  double w_z = 0.0;
  double b = 0.0;
  Transfer transfer = Transfer::sigmoid;
  bool include_z = true;

  double summary(std::span<const double> representation) const;
  std::vector<double> summaries(const Tensor2& representations) const;
  /// Positive-class score: a probability for sigmoid, a regression value for linear.
  double score(double r, int z) const;
  int predict(double r, int z) const { return score(r, z) >= 0.5 ? 1 : 0; }
};

struct ReattachmentResult {
  ReattachedHead head;
  FairnessReport report;
  EvalRecordSet records;
  /// |mean(r | z=0) - mean(r | z=1)| / pooled std on the fitting data.
  double r_group_mean_gap = 0.0;
  /// Set when r_group_mean_gap >= 0.1 (r visibly depends on z).
  bool independence_warning = false;
};

/// Two-stage fit on `train`: first the projector is fitted as a single linear
/// unit from g(x) to y (so r is on the logit scale for sigmoid transfer), then
/// (w_r, w_z, b) are fitted on (r, z). With `include_z == false`, w_z stays 0.
/// Both stages are exact (Newton / least squares). Metrics are on `eval`.
ReattachmentResult fit_reattached_head(const Network& frozen, const Dataset& train,
                                       const Dataset& eval, bool include_z,
                                       Transfer transfer = Transfer::sigmoid);

struct InfluenceReport {
  double w_r = 0.0;
  double w_z = 0.0;
  /// |w_z| / |w_r| (0 when w_z == 0).
  double ratio = 0.0;
};

InfluenceReport influence_report(const ReattachedHead& head);

struct HistogramPair {
  std::vector<double> edges;  // bins + 1 shared edges
  std::array<std::vector<std::size_t>, 2> counts;

  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  /// Sum over bins of min(p0, p1) with per-group normalized counts.
  double overlap() const;
};

/// Per-group histograms with shared edges spanning [min, max] of `values`.
/// When all values coincide the single value sits in the first bin of a unit
/// wide range.
HistogramPair group_histogram(std::span<const double> values, std::span<const int> groups,
                              std::size_t bins);

HistogramPair histogram_of_r(const ReattachedHead& head, const Network& frozen,
                             const Dataset& data, std::size_t bins = 30);

/// Binary logistic regression by Newton's method with an L2 penalty `ridge`
/// on the non-intercept weights. Returns (weights..., intercept).
Eigen::VectorXd fit_logistic(const Tensor2& features, std::span<const int> labels,
                             double ridge = 1e-4);

/// Ordinary least squares with intercept. Returns (weights..., intercept).
Eigen::VectorXd fit_least_squares(const Tensor2& features, std::span<const int> labels,
                                  double ridge = 1e-9);

}  // namespace invrep

#endif  // INVREP_INTERPRET_HPP
