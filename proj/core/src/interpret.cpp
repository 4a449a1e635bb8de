#include "invrep/interpret.hpp"

#include "invrep/data/sampler.hpp"
#include "invrep/error.hpp"
#include "invrep/nn/loss.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace invrep {

namespace {

void require_two_labels(std::span<const int> labels, const char* what) {
  std::set<int> seen(labels.begin(), labels.end());
  if (seen.size() < 2) {
    throw InputError(std::string(what) + ": needs at least two distinct labels");
  }
}

void require_binary(std::span<const int> values, const char* what) {
  for (int v : values) {
    if (v != 0 && v != 1) throw InputError(std::string(what) + " must be binary");
  }
}

Tensor2 with_intercept(const Tensor2& x) {
  Tensor2 d(x.rows(), x.cols() + 1);
  d.leftCols(x.cols()) = x;
  d.col(x.cols()).setOnes();
  return d;
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

DenseLayer train_softmax_head(const Tensor2& features, std::span<const int> labels,
                              int num_classes, const ProbeSettings& settings) {
  if (features.rows() == 0) throw InputError("probe: no training rows");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw InputError("probe: label count does not match feature rows");
  }
  require_two_labels(labels, "probe");
  if (num_classes < 2) throw InputError("probe: needs at least two classes");

  // Glorot-initialized softmax layer.
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> dist(
      0.0, std::sqrt(2.0 / static_cast<double>(features.cols() + num_classes)));
  std::vector<DenseLayer> head(1);
  head[0].weights.resize(features.cols(), num_classes);
  for (Eigen::Index k = 0; k < head[0].weights.size(); ++k) head[0].weights.data()[k] = dist(rng);
  head[0].bias = RowVector::Zero(num_classes);
  head[0].activation = Activation::softmax;

  Optimizer opt(settings.optimizer);
  BatchSampler sampler{std::min<std::size_t>(settings.batch_size, labels.size()),
                       BatchPolicy::shuffled, settings.seed};
  if (sampler.batch_size < 2) sampler.batch_size = 2;
  const std::vector<int> no_groups(labels.size(), 0);
  std::vector<int> batch_labels;
  for (std::size_t epoch = 0; epoch < settings.epochs; ++epoch) {
    for (const auto& rows : epoch_batches(no_groups, sampler, epoch)) {
      Tensor2 x(static_cast<Eigen::Index>(rows.size()), features.cols());
      batch_labels.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        batch_labels[i] = labels[rows[i]];
      }
      const ForwardTrace trace = forward(head, x);
      const LossResult loss = cross_entropy_from_logits(trace.logits(), batch_labels);
      opt.step(head, backward(std::span<const DenseLayer>(head), trace, loss.grad_at_output));
    }
  }
  return std::move(head[0]);
}

std::vector<int> predict_classes(const DenseLayer& head, const Tensor2& features) {
  Tensor2 logits = features * head.weights;
  logits.rowwise() += head.bias;
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    out[static_cast<std::size_t>(r)] = static_cast<int>(arg);
  }
  return out;
}

ProbeOutcome probe(const Network& frozen, const Dataset& train, const Dataset& eval,
                   ProbeObjective objective, const ProbeSettings& settings) {
  const bool sensitive = objective == ProbeObjective::predict_sensitive;
  if (sensitive && (!train.has_groups || !eval.has_groups)) {
    throw InputError("probe: sensitive objective needs data with z labels");
  }
  const std::vector<int>& train_labels = sensitive ? train.groups : train.targets;
  const std::vector<int>& eval_labels = sensitive ? eval.groups : eval.targets;
  if (eval_labels.empty()) throw InputError("probe: empty evaluation data");
  const int classes =
      sensitive ? 2 : std::max(train.num_classes(), eval.num_classes());

  const Tensor2 train_reps = representation(frozen, train.features);
  const Tensor2 eval_reps = representation(frozen, eval.features);

  ProbeOutcome out;
  out.head = train_softmax_head(train_reps, train_labels, classes, settings);
  out.predictions = predict_classes(out.head, eval_reps);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < eval_labels.size(); ++i) {
    if (out.predictions[i] == eval_labels[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(eval_labels.size());
  return out;
}

ProbeResult probe_representation(const Network& frozen, const Dataset& train,
                                 const Dataset& eval, const ProbeSettings& settings) {
  ProbeOutcome t = probe(frozen, train, eval, ProbeObjective::predict_target, settings);
  ProbeOutcome s = probe(frozen, train, eval, ProbeObjective::predict_sensitive, settings);
  ProbeResult r;
  r.target_accuracy = t.accuracy;
  r.sensitive_accuracy = s.accuracy;
  r.target_head = std::move(t.head);
  r.sensitive_head = std::move(s.head);
  r.target_predictions = std::move(t.predictions);
  r.sensitive_predictions = std::move(s.predictions);
  return r;
}

std::string_view transfer_name(Transfer t) {
  return t == Transfer::linear ? "linear" : "sigmoid";
}

Transfer parse_transfer(std::string_view name) {
  if (name == "linear") return Transfer::linear;
  if (name == "sigmoid") return Transfer::sigmoid;
  throw ConfigError("unknown transfer function '" + std::string(name) + "'");
}

double ReattachedHead::summary(std::span<const double> representation) const {
  double r = projector_bias;
  for (std::size_t k = 0; k < representation.size(); ++k) {
    r += projector(static_cast<Eigen::Index>(k)) * representation[k];
  }
  return r;
}

std::vector<double> ReattachedHead::summaries(const Tensor2& representations) const {
  std::vector<double> out(static_cast<std::size_t>(representations.rows()));
  for (Eigen::Index i = 0; i < representations.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = summary(row_span(representations, i));
  }
  return out;
}

double ReattachedHead::score(double r, int z) const {
  const double t = w_r * r + w_z * static_cast<double>(z) + b;
  return transfer == Transfer::sigmoid ? sigmoid(t) : t;
}

Eigen::VectorXd fit_logistic(const Tensor2& features, std::span<const int> labels,
                             double ridge) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows() || labels.empty()) {
    throw InputError("logistic fit: label count does not match rows");
  }
  require_binary(labels, "logistic fit labels");
  const Tensor2 x = with_intercept(features);
  const Eigen::Index p = x.cols();
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = labels[static_cast<std::size_t>(i)];
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, ridge);
  penalty(p - 1) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd mu(eta.size());
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    const Eigen::VectorXd grad = x.transpose() * (y - mu) - penalty.cwiseProduct(beta);
    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta += step;
    if (!beta.allFinite()) throw InputError("logistic fit diverged");
    if (step.lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + beta.lpNorm<Eigen::Infinity>())) break;
  }
  return beta;
}

Eigen::VectorXd fit_least_squares(const Tensor2& features, std::span<const int> labels,
                                  double ridge) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows() || labels.empty()) {
    throw InputError("least squares fit: label count does not match rows");
  }
  const Tensor2 x = with_intercept(features);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = labels[static_cast<std::size_t>(i)];
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += ridge;
  return gram.ldlt().solve(x.transpose() * y);
}

ReattachmentResult fit_reattached_head(const Network& frozen, const Dataset& train,
                                       const Dataset& eval, bool include_z,
                                       Transfer transfer) {
  if (!train.has_groups || !eval.has_groups) {
    throw InputError("reattachment needs data with z labels");
  }
  require_binary(train.targets, "reattachment target");
  require_binary(eval.targets, "reattachment target");
  require_two_labels(train.targets, "reattachment");

  const Tensor2 train_reps = representation(frozen, train.features);
  const Tensor2 eval_reps = representation(frozen, eval.features);

  auto fit = [&](const Tensor2& x, std::span<const int> y) {
    return transfer == Transfer::sigmoid ? fit_logistic(x, y) : fit_least_squares(x, y);
  };

  ReattachmentResult out;
  ReattachedHead& head = out.head;
  head.transfer = transfer;
  head.include_z = include_z;
  const Eigen::VectorXd proj = fit(train_reps, train.targets);
  head.projector = proj.head(train_reps.cols()).transpose();
  head.projector_bias = proj(train_reps.cols());

  const std::vector<double> r_train = head.summaries(train_reps);
  Tensor2 stage2(static_cast<Eigen::Index>(r_train.size()), include_z ? 2 : 1);
  for (std::size_t i = 0; i < r_train.size(); ++i) {
    stage2(static_cast<Eigen::Index>(i), 0) = r_train[i];
    if (include_z) stage2(static_cast<Eigen::Index>(i), 1) = train.groups[i];
  }
  const Eigen::VectorXd coef = fit(stage2, train.targets);
  head.w_r = coef(0);
  head.w_z = include_z ? coef(1) : 0.0;
  head.b = coef(coef.size() - 1);

  std::array<double, 2> sum{};
  std::array<double, 2> sq{};
  std::array<std::size_t, 2> cnt{};
  for (std::size_t i = 0; i < r_train.size(); ++i) {
    const auto g = static_cast<std::size_t>(train.groups[i]);
    sum[g] += r_train[i];
    sq[g] += r_train[i] * r_train[i];
    ++cnt[g];
  }
  if (cnt[0] > 0 && cnt[1] > 0) {
    const double m0 = sum[0] / static_cast<double>(cnt[0]);
    const double m1 = sum[1] / static_cast<double>(cnt[1]);
    const double ss = (sq[0] - static_cast<double>(cnt[0]) * m0 * m0) +
                      (sq[1] - static_cast<double>(cnt[1]) * m1 * m1);
    const double pooled = std::sqrt(std::max(ss, 0.0) / static_cast<double>(cnt[0] + cnt[1]));
    out.r_group_mean_gap = pooled > 0.0 ? std::abs(m0 - m1) / pooled : 0.0;
    out.independence_warning = out.r_group_mean_gap >= 0.1;
  }

  const std::vector<double> r_eval = head.summaries(eval_reps);
  out.records.truths = eval.targets;
  out.records.groups = eval.groups;
  out.records.predictions.resize(r_eval.size());
  for (std::size_t i = 0; i < r_eval.size(); ++i) {
    out.records.predictions[i] = head.predict(r_eval[i], eval.groups[i]);
  }
  out.report = fairness_report(out.records);
  return out;
}

InfluenceReport influence_report(const ReattachedHead& head) {
  InfluenceReport r;
  r.w_r = head.w_r;
  r.w_z = head.w_z;
  if (head.w_z == 0.0) {
    r.ratio = 0.0;
  } else {
    r.ratio = std::abs(head.w_z) / std::abs(head.w_r);
  }
  return r;
}

double HistogramPair::overlap() const {
  std::array<double, 2> total{};
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t c : counts[g]) total[g] += static_cast<double>(c);
  }
  if (total[0] == 0.0 || total[1] == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < bins(); ++k) {
    s += std::min(static_cast<double>(counts[0][k]) / total[0],
                  static_cast<double>(counts[1][k]) / total[1]);
  }
  return s;
}

HistogramPair group_histogram(std::span<const double> values, std::span<const int> groups,
                              std::size_t bins) {
  if (bins < 2) throw InputError("histogram: needs at least 2 bins");
  if (values.size() != groups.size()) throw InputError("histogram: values and groups differ");
  std::array<std::size_t, 2> n{};
  for (int g : groups) {
    if (g != 0 && g != 1) throw InputError("histogram: group ids must be 0 or 1");
    ++n[static_cast<std::size_t>(g)];
  }
  if (n[0] == 0 || n[1] == 0) {
    throw InputError("histogram: group " + std::to_string(n[0] == 0 ? 0 : 1) + " is empty");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (!(hi > lo)) hi = lo + 1.0;

  HistogramPair h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.edges[bins] = hi;
  h.counts[0].assign(bins, 0);
  h.counts[1].assign(bins, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto k = static_cast<std::size_t>((values[i] - lo) / (hi - lo) * static_cast<double>(bins));
    k = std::min(k, bins - 1);
    ++h.counts[static_cast<std::size_t>(groups[i])][k];
  }
  return h;
}

HistogramPair histogram_of_r(const ReattachedHead& head, const Network& frozen,
                             const Dataset& data, std::size_t bins) {
  const Tensor2 reps = representation(frozen, data.features);
  const std::vector<double> r = head.summaries(reps);
  return group_histogram(r, data.groups, bins);
}

}  // namespace invrep
