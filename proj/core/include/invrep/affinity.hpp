#ifndef INVREP_AFFINITY_HPP
#define INVREP_AFFINITY_HPP

#include "invrep/nn/tensor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace invrep {

enum class Distance { l1 };

/// Which group's samples are summed over.
enum class AffinityDirection {
  anchor_group_0,  // group 0 anchors, neighbors come from group 1
  symmetric_mean,  // average of both anchoring directions
};

/// Whether the subgradient of a matched distance also reaches the neighbor.
enum class NeighborGradient { both_sides, anchor_only };

/// How the summed anchor distances are averaged.
enum class AffinityNormalization {
  literal,         // 1 / (|Y| |X1|) over the whole sum
  per_class_mean,  // mean over classes of the mean distance within each class
};

std::string_view direction_name(AffinityDirection d);
AffinityDirection parse_direction(std::string_view name);
std::string_view neighbor_gradient_name(NeighborGradient g);
NeighborGradient parse_neighbor_gradient(std::string_view name);
std::string_view normalization_name(AffinityNormalization n);
AffinityNormalization parse_normalization(std::string_view name);

struct AffinityConfig {
  double lambda = 0.01;
  Distance distance = Distance::l1;
  bool class_conditional = true;
  AffinityDirection direction = AffinityDirection::anchor_group_0;
  NeighborGradient neighbor_gradient = NeighborGradient::both_sides;
  AffinityNormalization normalization = AffinityNormalization::literal;

  void validate() const;
};

/// Non-owning view of one mini-batch of representations with labels and
/// binary group ids.
struct GroupedBatch {
  const Tensor2& representations;
  std::span<const int> labels;
  std::span<const int> groups;

  void validate() const;
};

struct MatchedPair {
  std::size_t anchor = 0;
  std::size_t neighbor = 0;
  double distance = 0.0;
};

struct AffinityResult {
  double loss = 0.0;
  /// Gradient of the (unweighted) affinity loss w.r.t. the representations.
  Tensor2 grad_at_representation;
  std::vector<MatchedPair> matched_pairs;
  /// Anchor classes without a cross-group counterpart in this batch.
  std::vector<int> skipped_classes;
  /// Set when one group is absent from the batch; the loss is then 0.
  bool degenerate = false;
};

struct NeighborHit {
  std::size_t index = 0;
  double distance = 0.0;
};

double l1_distance(std::span<const double> a, std::span<const double> b);

/// Exhaustive L1 nearest neighbor over the rows of `candidates`. Ties go to
/// the lowest row index. Empty candidate set yields nullopt.
std::optional<NeighborHit> nearest_neighbor_l1(std::span<const double> query,
                                               const Tensor2& candidates);

/// Same search restricted to `rows` of `pool`; the returned index is a row of
/// `pool`. `rows` must be ascending for the tie-break to be lowest-index.
std::optional<NeighborHit> nearest_neighbor_l1(std::span<const double> query,
                                               const Tensor2& pool,
                                               std::span<const std::size_t> rows);

/// Mini-batch affinity loss
///
///   (1 / (|Y| |X1|)) * sum_y sum_{x1 in X1, y1 = y} min_{x2 in X2, y2 = y} d(g(x1), g(x2))
///
/// with X1 the anchor group, |Y| the number of classes present among the
/// anchors and |X1| the anchor count. Anchors whose class has no counterpart
/// in the other group contribute nothing (the normalization is unchanged) and
/// their class is reported in `skipped_classes`. With `per_class_mean`
/// normalization each anchor of class y is weighted 1 / (|Y| |X1 of class y|)
/// instead.
AffinityResult affinity_loss(const GroupedBatch& batch, const AffinityConfig& cfg);

/// l_target + lambda * l_affinity.
double combined_loss(double target_loss, const AffinityResult& affinity, double lambda);

}  // namespace invrep

#endif  // INVREP_AFFINITY_HPP
