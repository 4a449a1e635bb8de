#include "invrep/metrics.hpp"

#include "invrep/error.hpp"

#include <cmath>
#include <string>

namespace invrep {

namespace {

struct GroupCounts {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t predicted_positive = 0;
  std::size_t positives = 0;
  std::size_t true_positives = 0;
  std::size_t negatives = 0;
  std::size_t true_negatives = 0;
};

std::array<GroupCounts, 2> count(const EvalRecordSet& r) {
  std::array<GroupCounts, 2> c{};
  for (std::size_t i = 0; i < r.size(); ++i) {
    GroupCounts& g = c[static_cast<std::size_t>(r.groups[i])];
    const bool pred = r.predictions[i] == 1;
    const bool truth = r.truths[i] == 1;
    ++g.total;
    if (r.predictions[i] == r.truths[i]) ++g.correct;
    if (pred) ++g.predicted_positive;
    if (truth) {
      ++g.positives;
      if (pred) ++g.true_positives;
    } else {
      ++g.negatives;
      if (!pred) ++g.true_negatives;
    }
  }
  return c;
}

double ratio(std::size_t num, std::size_t den, int group, const char* what) {
  if (den == 0) {
    throw MetricError(std::string(what) + " is undefined: group " + std::to_string(group) +
                      " has no samples in the required stratum");
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void EvalRecordSet::validate() const {
  if (truths.size() != predictions.size() || groups.size() != predictions.size()) {
    throw InputError("evaluation records differ in length");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] != 0 && groups[i] != 1) {
      throw InputError("group id at record " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

void EvalRecordSet::validate_binary() const {
  validate();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if ((predictions[i] != 0 && predictions[i] != 1) || (truths[i] != 0 && truths[i] != 1)) {
      throw InputError("fairness gaps need binary predictions and truths (record " +
                       std::to_string(i) + ")");
    }
  }
}

double accuracy(const EvalRecordSet& records) {
  records.validate();
  if (records.size() == 0) throw MetricError("accuracy is undefined on zero records");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records.predictions[i] == records.truths[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double equality_gap(const EvalRecordSet& records) {
  records.validate_binary();
  const auto c = count(records);
  return std::abs(ratio(c[0].true_positives, c[0].positives, 0, "true positive rate") -
                  ratio(c[1].true_positives, c[1].positives, 1, "true positive rate"));
}

double parity_gap(const EvalRecordSet& records) {
  records.validate_binary();
  const auto c = count(records);
  return std::abs(ratio(c[0].predicted_positive, c[0].total, 0, "positive rate") -
                  ratio(c[1].predicted_positive, c[1].total, 1, "positive rate"));
}

double tnr_gap(const EvalRecordSet& records) {
  records.validate_binary();
  const auto c = count(records);
  return std::abs(ratio(c[0].true_negatives, c[0].negatives, 0, "true negative rate") -
                  ratio(c[1].true_negatives, c[1].negatives, 1, "true negative rate"));
}

std::array<double, 2> per_group_accuracy(const EvalRecordSet& records) {
  records.validate();
  const auto c = count(records);
  return {ratio(c[0].correct, c[0].total, 0, "group accuracy"),
          ratio(c[1].correct, c[1].total, 1, "group accuracy")};
}

std::array<double, 2> per_group_positive_rate(const EvalRecordSet& records) {
  records.validate_binary();
  const auto c = count(records);
  return {ratio(c[0].predicted_positive, c[0].total, 0, "positive rate"),
          ratio(c[1].predicted_positive, c[1].total, 1, "positive rate")};
}

FairnessReport fairness_report(const EvalRecordSet& records) {
  FairnessReport r;
  r.accuracy = accuracy(records);
  r.parity_gap = parity_gap(records);
  r.equality_gap_tpr = equality_gap(records);
  r.equality_gap_tnr = tnr_gap(records);
  r.per_group_accuracy = per_group_accuracy(records);
  r.per_group_positive_rate = per_group_positive_rate(records);
  return r;
}

}  // namespace invrep
