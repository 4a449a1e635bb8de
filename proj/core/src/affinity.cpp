#include "invrep/affinity.hpp"

#include "invrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace invrep {

std::string_view direction_name(AffinityDirection d) {
  return d == AffinityDirection::anchor_group_0 ? "anchor_group_0" : "symmetric_mean";
}

AffinityDirection parse_direction(std::string_view name) {
  if (name == "anchor_group_0") return AffinityDirection::anchor_group_0;
  if (name == "symmetric_mean") return AffinityDirection::symmetric_mean;
  throw ConfigError("unknown affinity direction '" + std::string(name) + "'");
}

std::string_view neighbor_gradient_name(NeighborGradient g) {
  return g == NeighborGradient::both_sides ? "both_sides" : "anchor_only";
}

NeighborGradient parse_neighbor_gradient(std::string_view name) {
  if (name == "both_sides") return NeighborGradient::both_sides;
  if (name == "anchor_only") return NeighborGradient::anchor_only;
  throw ConfigError("unknown neighbor gradient policy '" + std::string(name) + "'");
}

std::string_view normalization_name(AffinityNormalization n) {
  return n == AffinityNormalization::literal ? "literal" : "per_class_mean";
}

AffinityNormalization parse_normalization(std::string_view name) {
  if (name == "literal") return AffinityNormalization::literal;
  if (name == "per_class_mean") return AffinityNormalization::per_class_mean;
  throw ConfigError("unknown affinity normalization '" + std::string(name) + "'");
}

void AffinityConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("affinity lambda must be finite and >= 0");
  }
}

void GroupedBatch::validate() const {
  const auto n = static_cast<std::size_t>(representations.rows());
  if (n == 0) throw InputError("affinity: empty batch");
  if (representations.cols() < 1) throw InputError("affinity: representation width is 0");
  if (labels.size() != n || groups.size() != n) {
    throw InputError("affinity: representations, labels and groups differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (groups[i] != 0 && groups[i] != 1) {
      throw InputError("affinity: group id at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

std::optional<NeighborHit> nearest_neighbor_l1(std::span<const double> query,
                                               const Tensor2& candidates) {
  if (candidates.rows() == 0) return std::nullopt;
  if (static_cast<Eigen::Index>(query.size()) != candidates.cols()) {
    throw InputError("nearest neighbor: query width does not match candidates");
  }
  NeighborHit best{0, l1_distance(query, row_span(candidates, 0))};
  for (Eigen::Index r = 1; r < candidates.rows(); ++r) {
    const double d = l1_distance(query, row_span(candidates, r));
    if (d < best.distance) best = {static_cast<std::size_t>(r), d};
  }
  return best;
}

std::optional<NeighborHit> nearest_neighbor_l1(std::span<const double> query,
                                               const Tensor2& pool,
                                               std::span<const std::size_t> rows) {
  if (rows.empty()) return std::nullopt;
  if (static_cast<Eigen::Index>(query.size()) != pool.cols()) {
    throw InputError("nearest neighbor: query width does not match candidates");
  }
  NeighborHit best{rows[0], l1_distance(query, row_span(pool, static_cast<Eigen::Index>(rows[0])))};
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double d = l1_distance(query, row_span(pool, static_cast<Eigen::Index>(rows[k])));
    if (d < best.distance) best = {rows[k], d};
  }
  return best;
}

namespace {

AffinityResult directional(const GroupedBatch& batch, const AffinityConfig& cfg,
                           int anchor_group) {
  const Tensor2& reps = batch.representations;
  const auto n = static_cast<std::size_t>(reps.rows());
  AffinityResult out;
  out.grad_at_representation = Tensor2::Zero(reps.rows(), reps.cols());

  std::vector<std::size_t> anchors;
  std::vector<std::size_t> others;
  std::map<int, std::vector<std::size_t>> others_by_class;
  std::map<int, std::size_t> anchor_classes;  // class -> anchor count
  for (std::size_t i = 0; i < n; ++i) {
    if (batch.groups[i] == anchor_group) {
      anchors.push_back(i);
      ++anchor_classes[batch.labels[i]];
    } else {
      others.push_back(i);
      others_by_class[batch.labels[i]].push_back(i);
    }
  }
  if (anchors.empty() || others.empty()) {
    out.degenerate = true;
    return out;
  }

  const auto num_classes = static_cast<double>(anchor_classes.size());
  const bool per_class = cfg.normalization == AffinityNormalization::per_class_mean;
  const bool both = cfg.neighbor_gradient == NeighborGradient::both_sides;
  const std::vector<std::size_t> none;
  std::set<int> skipped;
  double sum = 0.0;
  for (std::size_t a : anchors) {
    const int y = batch.labels[a];
    const double scale =
        1.0 / (num_classes * static_cast<double>(per_class ? anchor_classes[y] : anchors.size()));
    const std::vector<std::size_t>* pool = &others;
    if (cfg.class_conditional) {
      auto it = others_by_class.find(y);
      pool = it == others_by_class.end() ? &none : &it->second;
    }
    const auto q = row_span(reps, static_cast<Eigen::Index>(a));
    const auto hit = nearest_neighbor_l1(q, reps, *pool);
    if (!hit) {
      skipped.insert(y);
      continue;
    }
    sum += hit->distance * scale;
    out.matched_pairs.push_back({a, hit->index, hit->distance});

    const auto ai = static_cast<Eigen::Index>(a);
    const auto ni = static_cast<Eigen::Index>(hit->index);
    for (Eigen::Index k = 0; k < reps.cols(); ++k) {
      const double diff = reps(ai, k) - reps(ni, k);
      const double s = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
      out.grad_at_representation(ai, k) += s;
      if (both) out.grad_at_representation(ni, k) -= s;
    }
  }
  out.loss = sum;
  out.skipped_classes.assign(skipped.begin(), skipped.end());
  return out;
}

}  // namespace

AffinityResult affinity_loss(const GroupedBatch& batch, const AffinityConfig& cfg) {
  cfg.validate();
  batch.validate();
  if (cfg.direction == AffinityDirection::anchor_group_0) return directional(batch, cfg, 0);

  AffinityResult fwd = directional(batch, cfg, 0);
  AffinityResult rev = directional(batch, cfg, 1);
  AffinityResult out;
  out.degenerate = fwd.degenerate || rev.degenerate;
  if (out.degenerate) {
    out.grad_at_representation = std::move(fwd.grad_at_representation);
    return out;
  }
  out.loss = 0.5 * (fwd.loss + rev.loss);
  out.grad_at_representation = 0.5 * (fwd.grad_at_representation + rev.grad_at_representation);
  out.matched_pairs = std::move(fwd.matched_pairs);
  out.matched_pairs.insert(out.matched_pairs.end(), rev.matched_pairs.begin(),
                           rev.matched_pairs.end());
  std::set<int> skipped(fwd.skipped_classes.begin(), fwd.skipped_classes.end());
  skipped.insert(rev.skipped_classes.begin(), rev.skipped_classes.end());
  out.skipped_classes.assign(skipped.begin(), skipped.end());
  return out;
}

double combined_loss(double target_loss, const AffinityResult& affinity, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (lambda == 0.0) return target_loss;
  return target_loss + lambda * affinity.loss;
}

}  // namespace invrep
