#include "invrep/runner/experiments.hpp"

#include "invrep/data/transform.hpp"
#include "invrep/error.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace invrep {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

RunReport base_report(const ExperimentConfig& cfg, std::uint64_t seed, std::string mode) {
  RunReport r;
  r.name = cfg.name;
  r.recipe = std::string(recipe_name(cfg.recipe));
  r.mode = std::move(mode);
  r.seed = seed;
  r.lambda = cfg.affinity.lambda;
  r.config_json = config_to_json(cfg);
  r.evaluation_split = std::string(split_name(cfg.evaluation_split));
  return r;
}

void fill_evaluation(RunReport& r, const Evaluation& e, std::size_t eval_rows) {
  r.eval_rows = eval_rows;
  r.accuracy = e.accuracy;
  r.fairness = e.fairness;
  if (e.probe) {
    r.probe_target_accuracy = e.probe->target_accuracy;
    r.probe_sensitive_accuracy = e.probe->sensitive_accuracy;
  }
}

const Dataset& eval_split(const ExperimentConfig& cfg, const PreparedData& data) {
  const Dataset& ds = data.split(cfg.evaluation_split);
  if (ds.size() == 0) {
    throw ConfigError("evaluation split '" + std::string(split_name(cfg.evaluation_split)) +
                      "' is empty for recipe " + std::string(recipe_name(cfg.recipe)));
  }
  return ds;
}

ProbeSettings probe_settings(const ExperimentConfig& cfg, std::uint64_t seed) {
  ProbeSettings p = cfg.probe;
  p.seed = derive_seed(seed, 0x9b0be);
  return p;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          const PreparedData& data) {
  const auto start = Clock::now();
  RunReport report = base_report(cfg, seed, "train");
  report.warnings = data.notes;
  TrainOutcome t = train_network(cfg, data.train, seed);
  report.epochs = t.epochs;
  report.steps = t.steps;
  report.degenerate_batches = t.degenerate_batches;
  report.train_rows = data.train.size();
  if (t.degenerate_batches > 0) {
    report.warnings.push_back(std::to_string(t.degenerate_batches) +
                              " batches had only one group; their affinity term was 0");
  }
  const Dataset& eval = eval_split(cfg, data);
  const Evaluation e =
      evaluate(t.net, eval, cfg.run_probe ? &data.train : nullptr, probe_settings(cfg, seed));
  fill_evaluation(report, e, eval.size());
  report.wall_seconds = seconds_since(start);
  return {std::move(t.net), std::move(report)};
}

RunReport evaluate_network(const ExperimentConfig& cfg, const Network& net,
                           const PreparedData& data) {
  const auto start = Clock::now();
  RunReport report = base_report(cfg, cfg.seeds.front(), "evaluate");
  report.warnings = data.notes;
  report.train_rows = data.train.size();
  const Dataset& eval = eval_split(cfg, data);
  const Evaluation e = evaluate(net, eval, cfg.run_probe ? &data.train : nullptr,
                                probe_settings(cfg, cfg.seeds.front()));
  fill_evaluation(report, e, eval.size());
  report.wall_seconds = seconds_since(start);
  return report;
}

std::string_view sweep_axis_name(SweepAxis a) {
  return a == SweepAxis::lambda ? "lambda" : "rep_width";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "lambda") return SweepAxis::lambda;
  if (name == "rep_width") return SweepAxis::rep_width;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  if (axis == SweepAxis::lambda) {
    out.affinity.lambda = value;
  } else {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError("representation width must be a positive integer");
    }
    out.hidden_widths.at(out.resolved_representation_index()) = static_cast<std::size_t>(value);
  }
  out.validate();
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

namespace {

template <typename Get>
Summary summarize_runs(const std::vector<RunReport>& runs, Get get) {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (auto x = get(r)) v.push_back(*x);
  }
  return summarize(v);
}

}  // namespace

Summary SweepCell::accuracy() const {
  return summarize_runs(runs, [](const RunReport& r) { return std::optional<double>(r.accuracy); });
}
Summary SweepCell::probe_target() const {
  return summarize_runs(runs, [](const RunReport& r) { return r.probe_target_accuracy; });
}
Summary SweepCell::probe_sensitive() const {
  return summarize_runs(runs, [](const RunReport& r) { return r.probe_sensitive_accuracy; });
}

SweepTable sweep(const ExperimentConfig& cfg, SweepAxis axis, std::span<const double> values,
                 const PreparedData& data, const Progress& progress) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepTable table;
  table.axis = axis;
  for (double v : values) {
    SweepCell cell;
    cell.value = v;
    const ExperimentConfig c = with_axis_value(cfg, axis, v);
    for (std::uint64_t seed : c.seeds) {
      try {
        cell.runs.push_back(run_experiment(c, seed, data).report);
        if (progress) {
          const RunReport& r = cell.runs.back();
          std::string line = std::string(sweep_axis_name(axis)) + "=" + std::to_string(v) +
                             " seed=" + std::to_string(seed) +
                             " accuracy=" + std::to_string(r.accuracy);
          if (r.probe_sensitive_accuracy) {
            line += " probe_sensitive=" + std::to_string(*r.probe_sensitive_accuracy);
          }
          progress(line);
        }
      } catch (const Error& e) {
        cell.errors.push_back("seed=" + std::to_string(seed) + ": " + e.what());
        if (progress) progress("error: " + cell.errors.back());
      }
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

std::string_view adapt_mode_name(AdaptMode m) {
  switch (m) {
    case AdaptMode::source_only: return "source_only";
    case AdaptMode::augmentation_baseline: return "augmentation_baseline";
    case AdaptMode::source_plus_augmentation: return "source_plus_augmentation";
    case AdaptMode::affinity: return "affinity";
  }
  return "unknown";
}

AdaptMode parse_adapt_mode(std::string_view name) {
  for (AdaptMode m :
       {AdaptMode::source_only, AdaptMode::augmentation_baseline,
        AdaptMode::source_plus_augmentation, AdaptMode::affinity}) {
    if (adapt_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown adaptation mode '" + std::string(name) + "'");
}

RunOutcome run_domain_adaptation(const ExperimentConfig& cfg, AdaptMode mode,
                                 std::uint64_t seed, const DomainData& data) {
  const auto start = Clock::now();
  const std::size_t n_target = cfg.data.target_samples;
  if (n_target > data.target_pool.size()) {
    throw InputError("requested " + std::to_string(n_target) + " target samples, pool has " +
                     std::to_string(data.target_pool.size()));
  }
  ExperimentConfig c = cfg;
  std::vector<std::string> warnings;
  if (mode == AdaptMode::affinity && n_target == 0) {
    warnings.push_back("no labeled target samples: target group absent, running source_only");
    mode = AdaptMode::source_only;
  }
  if (mode != AdaptMode::source_only && n_target == 0) {
    warnings.push_back("no labeled target samples: nothing to augment, running source_only");
    mode = AdaptMode::source_only;
  }
  if (mode != AdaptMode::affinity) c.affinity.lambda = 0.0;

  RunReport report = base_report(c, seed, std::string(adapt_mode_name(mode)));
  report.evaluation_split = "target_test";

  Dataset train;
  std::size_t target_begin = 0;
  if (mode == AdaptMode::source_only) {
    train = data.source;
  } else {
    const auto rows = class_balanced_sample(data.target_pool, n_target, cfg.data.seed + 7);
    std::vector<std::size_t> repeated;
    const std::size_t copies =
        cfg.data.balance_domains ? std::max<std::size_t>(1, data.source.size() / n_target) : 1;
    repeated.reserve(rows.size() * copies);
    for (std::size_t k = 0; k < copies; ++k) repeated.insert(repeated.end(), rows.begin(), rows.end());
    Dataset target = data.target_pool.subset(repeated);
    if (mode == AdaptMode::augmentation_baseline) {
      target.groups.assign(target.size(), 1);
      target.has_groups = true;
      train = std::move(target);
    } else {
      train = merge_as_groups(data.source, target);
      target_begin = data.source.size();
    }
  }

  EpochHook hook;
  if (mode == AdaptMode::augmentation_baseline || mode == AdaptMode::source_plus_augmentation) {
    if (!train.image_shape) throw InputError("augmentation needs image-shaped data");
    const Tensor2 base = train.features.bottomRows(train.features.rows() -
                                                   static_cast<Eigen::Index>(target_begin));
    const ImageShape shape = *train.image_shape;
    const double range = cfg.data.augment_degrees;
    hook = [base, shape, range, target_begin, seed](Dataset& ds, std::size_t epoch) {
      std::mt19937_64 rng(derive_seed(seed, 0xa09000 + epoch));
      std::uniform_real_distribution<double> angle(-range, range);
      for (Eigen::Index r = 0; r < base.rows(); ++r) {
        const Eigen::Index dst = static_cast<Eigen::Index>(target_begin) + r;
        rotate_image(row_span(base, r),
                     {ds.features.data() + dst * ds.features.cols(),
                      static_cast<std::size_t>(ds.features.cols())},
                     shape.rows, shape.cols, angle(rng));
      }
    };
  }

  TrainOutcome t = train_network(c, train, seed, hook);
  report.epochs = t.epochs;
  report.steps = t.steps;
  report.degenerate_batches = t.degenerate_batches;
  report.train_rows = train.size();
  report.warnings = std::move(warnings);
  const Evaluation e = evaluate(t.net, data.target_test, nullptr, {});
  fill_evaluation(report, e, data.target_test.size());
  report.wall_seconds = seconds_since(start);
  return {std::move(t.net), std::move(report)};
}

AdultStudy run_adult_study(const ExperimentConfig& cfg, std::uint64_t seed,
                           const PreparedData& without_z, const PreparedData& with_z) {
  if (cfg.recipe != Recipe::adult) throw ConfigError("the Adult study needs recipe adult");
  ExperimentConfig base = cfg;
  base.affinity.lambda = 0.0;
  base.run_probe = false;

  auto fairness_of = [](const RunOutcome& o) {
    if (!o.report.fairness) throw MetricError("no fairness report for a binary target");
    return *o.report.fairness;
  };

  const RunOutcome b0 = run_experiment(base, seed, without_z);
  const RunOutcome b1 = run_experiment(base, seed, with_z);
  ExperimentConfig fair_cfg = cfg;
  fair_cfg.run_probe = false;
  RunOutcome fair = run_experiment(fair_cfg, seed, without_z);

  const Dataset& eval = eval_split(cfg, without_z);
  ProbeResult probe = probe_representation(fair.net, without_z.train, eval, probe_settings(cfg, seed));
  ReattachmentResult head = fit_reattached_head(fair.net, without_z.train, eval, false);
  ReattachmentResult reattached = fit_reattached_head(fair.net, without_z.train, eval, true);
  InfluenceReport influence = influence_report(reattached.head);
  HistogramPair hist = histogram_of_r(reattached.head, fair.net, eval);

  return AdultStudy{fairness_of(b0),        fairness_of(b1),       fairness_of(fair),
                    std::move(probe),       std::move(head),       std::move(reattached),
                    influence,              std::move(hist),       std::move(fair.net)};
}

}  // namespace invrep
