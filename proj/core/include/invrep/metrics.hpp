#ifndef INVREP_METRICS_HPP
#define INVREP_METRICS_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace invrep {

/// Predictions, truths and binary group ids of one evaluation.
struct EvalRecordSet {
  std::vector<int> predictions;
  std::vector<int> truths;
  std::vector<int> groups;

  std::size_t size() const { return predictions.size(); }
  /// Equal lengths and groups in {0, 1}.
  void validate() const;
  /// Additionally requires predictions and truths in {0, 1}.
  void validate_binary() const;
};

struct FairnessReport {
  double accuracy = 0.0;
  double parity_gap = 0.0;
  double equality_gap_tpr = 0.0;
  double equality_gap_tnr = 0.0;
  std::array<double, 2> per_group_accuracy{};
  std::array<double, 2> per_group_positive_rate{};
};

double accuracy(const EvalRecordSet& records);

/// |TPR(z=0) - TPR(z=1)|. MetricError when a group has no positive truth.
double equality_gap(const EvalRecordSet& records);

/// |P(y_hat=1 | z=0) - P(y_hat=1 | z=1)|. MetricError on an empty group.
double parity_gap(const EvalRecordSet& records);

/// |TNR(z=0) - TNR(z=1)|. MetricError when a group has no negative truth.
double tnr_gap(const EvalRecordSet& records);

std::array<double, 2> per_group_accuracy(const EvalRecordSet& records);
std::array<double, 2> per_group_positive_rate(const EvalRecordSet& records);

/// All of the above; requires binary predictions and truths.
FairnessReport fairness_report(const EvalRecordSet& records);

}  // namespace invrep

#endif  // INVREP_METRICS_HPP
