// invrep command line: train, sweep, adapt, evaluate, dump-embeddings.

#include "invrep/data/dataset.hpp"
#include "invrep/error.hpp"
#include "invrep/interpret.hpp"
#include "invrep/nn/checkpoint.hpp"
#include "invrep/runner/config.hpp"
#include "invrep/runner/experiments.hpp"
#include "invrep/runner/recipes.hpp"
#include "invrep/runner/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace fs = std::filesystem;
using namespace invrep;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "run this seed only instead of the config's seed list");
  cmd->add_option("--lambda", c.lambda, "override the affinity weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out-dir", c.out_dir, "directory for reports and checkpoints");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.seeds = {*c.seed};
  if (c.lambda) cfg.affinity.lambda = *c.lambda;
  if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
  cfg.validate();
  return cfg;
}

fs::path seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.out_dir / ("seed_" + std::to_string(seed));
}

void print_run(const RunReport& r) {
  std::cout << "seed=" << r.seed << " lambda=" << r.lambda << " accuracy=" << r.accuracy;
  if (r.fairness) {
    std::cout << " parity_gap=" << r.fairness->parity_gap
              << " equality_gap=" << r.fairness->equality_gap_tpr
              << " tnr_gap=" << r.fairness->equality_gap_tnr;
  }
  if (r.probe_target_accuracy) std::cout << " probe_target=" << *r.probe_target_accuracy;
  if (r.probe_sensitive_accuracy) std::cout << " probe_sensitive=" << *r.probe_sensitive_accuracy;
  std::cout << " seconds=" << r.wall_seconds << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_train(const Common& c, bool study) {
  const ExperimentConfig cfg = load(c);
  if (study) {
    if (cfg.recipe != Recipe::adult) throw ConfigError("--study needs the adult recipe");
    ExperimentConfig without = cfg;
    without.data.exclude_z = true;
    ExperimentConfig with = cfg;
    with.data.exclude_z = false;
    const PreparedData d0 = prepare_data(without);
    const PreparedData d1 = prepare_data(with);
    for (std::uint64_t seed : cfg.seeds) {
      const AdultStudy s = run_adult_study(cfg, seed, d0, d1);
      const std::string text = "seed=" + std::to_string(seed) + "\n" + format_adult_study(s);
      std::cout << text;
      if (!cfg.out_dir.empty()) {
        write_text_file(seed_dir(cfg, seed) / "adult_study.txt", text);
        write_text_file(seed_dir(cfg, seed) / "r_histogram.csv", format_histogram_csv(s.r_histogram));
        save_network(s.fair_net, seed_dir(cfg, seed) / "network.json");
      }
    }
    return 0;
  }
  const PreparedData data = prepare_data(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    const RunOutcome run = run_experiment(cfg, seed, data);
    print_run(run.report);
    if (!cfg.out_dir.empty()) write_run(run, seed_dir(cfg, seed));
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& axis_name, std::vector<double> values) {
  const ExperimentConfig cfg = load(c);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  if (values.empty()) {
    values = axis == SweepAxis::lambda ? std::vector<double>{0, 1e-4, 1e-3, 1e-2, 1e-1}
                                       : std::vector<double>{1, 5, 10, 20, 50, 100};
  }
  const PreparedData data = prepare_data(cfg);
  const SweepTable table =
      sweep(cfg, axis, values, data, [](const std::string& line) { std::cerr << line << '\n'; });
  const std::string csv = format_sweep_csv(table);
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_text_file(cfg.out_dir / "sweep.csv", csv);
  std::size_t failed = 0;
  for (const auto& cell : table.cells) failed += cell.errors.size();
  return failed == 0 ? 0 : 1;
}

int cmd_adapt(const Common& c, const std::string& mode_name,
              std::optional<std::size_t> target_samples) {
  ExperimentConfig cfg = load(c);
  if (target_samples) cfg.data.target_samples = *target_samples;
  std::vector<AdaptMode> modes;
  if (mode_name == "all") {
    modes = {AdaptMode::source_only, AdaptMode::augmentation_baseline,
             AdaptMode::source_plus_augmentation, AdaptMode::affinity};
  } else {
    modes = {parse_adapt_mode(mode_name)};
  }
  const DomainData data = prepare_domain_data(cfg);
  for (AdaptMode mode : modes) {
    for (std::uint64_t seed : cfg.seeds) {
      const RunOutcome run = run_domain_adaptation(cfg, mode, seed, data);
      std::cout << "mode=" << run.report.mode << ' ';
      print_run(run.report);
      if (!cfg.out_dir.empty()) {
        write_run(run, cfg.out_dir / std::string(adapt_mode_name(mode)) /
                           ("seed_" + std::to_string(seed)));
      }
    }
  }
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, bool reattach) {
  const ExperimentConfig cfg = load(c);
  const Network net = load_network(checkpoint);
  const PreparedData data = prepare_data(cfg);
  const RunReport report = evaluate_network(cfg, net, data);
  std::cout << format_run_report(report);
  if (!cfg.out_dir.empty()) write_text_file(cfg.out_dir / "evaluation.txt", format_run_report(report));
  if (reattach) {
    const Dataset& eval = data.split(cfg.evaluation_split);
    const ReattachmentResult head = fit_reattached_head(net, data.train, eval, true);
    const InfluenceReport inf = influence_report(head.head);
    const HistogramPair hist = histogram_of_r(head.head, net, eval);
    std::cout << "reattached.accuracy=" << head.report.accuracy
              << "\nreattached.parity_gap=" << head.report.parity_gap
              << "\nreattached.equality_gap_tpr=" << head.report.equality_gap_tpr
              << "\nreattached.w_r=" << inf.w_r << "\nreattached.w_z=" << inf.w_z
              << "\nreattached.influence_ratio=" << inf.ratio
              << "\nr_histogram.overlap=" << hist.overlap() << '\n';
    if (head.independence_warning) {
      std::cerr << "warning: r differs between groups by " << head.r_group_mean_gap
                << " pooled std; z and r are not independent\n";
    }
    if (!cfg.out_dir.empty()) write_text_file(cfg.out_dir / "r_histogram.csv", format_histogram_csv(hist));
  }
  return 0;
}

int cmd_dump(const Common& c, const std::string& checkpoint, const std::string& output,
             const std::string& split) {
  const ExperimentConfig cfg = load(c);
  const Network net = load_network(checkpoint);
  const PreparedData data = prepare_data(cfg);
  const Dataset& ds = split == "train" ? data.train : split == "validation" ? data.validation : data.test;
  if (ds.size() == 0) throw ConfigError("split '" + split + "' is empty for this recipe");
  fs::path path = output;
  if (path.empty()) {
    if (cfg.out_dir.empty()) throw ConfigError("give --output or --out-dir");
    path = cfg.out_dir / ("embeddings_" + split + ".csv");
  }
  dump_embeddings(net, ds, path);
  std::cout << "wrote " << ds.size() << " rows to " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Per-step activations are >= 128 KiB; keep them off mmap so every
  // training step does not pay for fresh page faults.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
#endif
  CLI::App app{"invariant representation learning with the affinity loss"};
  app.require_subcommand(1);

  Common common;

  auto* train = app.add_subcommand("train", "train one run per seed and report");
  add_common(train, common);
  bool study = false;
  train->add_flag("--study", study, "Adult: baselines with/without z, fair model, reattached z");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over lambda or representation width");
  add_common(sweep_cmd, common);
  std::string axis = "lambda";
  std::vector<double> values;
  sweep_cmd->add_option("--axis", axis, "lambda | rep_width")->check(CLI::IsMember({"lambda", "rep_width"}));
  sweep_cmd->add_option("--values", values, "comma separated values")->delimiter(',');

  auto* adapt = app.add_subcommand("adapt", "MNIST -> rotated MNIST few-shot adaptation");
  add_common(adapt, common);
  std::string mode = "all";
  std::optional<std::size_t> target_samples;
  adapt->add_option("--mode", mode, "source_only | augmentation_baseline | source_plus_augmentation | affinity | all")
      ->check(CLI::IsMember({"source_only", "augmentation_baseline", "source_plus_augmentation",
                             "affinity", "all"}));
  adapt->add_option("--target-samples", target_samples, "labeled target rows");

  auto* eval = app.add_subcommand("evaluate", "evaluate a saved network");
  add_common(eval, common);
  std::string checkpoint;
  bool reattach = false;
  eval->add_option("--checkpoint", checkpoint, "network.json")->required()->check(CLI::ExistingFile);
  eval->add_flag("--reattach", reattach, "fit y = f(w_r r + w_z z + b) and report influence");

  auto* dump = app.add_subcommand("dump-embeddings", "write representation vectors as CSV");
  add_common(dump, common);
  std::string dump_checkpoint;
  std::string output;
  std::string split = "test";
  dump->add_option("--checkpoint", dump_checkpoint, "network.json")->required()->check(CLI::ExistingFile);
  dump->add_option("--output", output, "CSV path (default <out-dir>/embeddings_<split>.csv)");
  dump->add_option("--split", split, "train | validation | test")
      ->check(CLI::IsMember({"train", "validation", "test"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(common, study);
    if (*sweep_cmd) return cmd_sweep(common, axis, values);
    if (*adapt) return cmd_adapt(common, mode, target_samples);
    if (*eval) return cmd_evaluate(common, checkpoint, reattach);
    if (*dump) return cmd_dump(common, dump_checkpoint, output, split);
  } catch (const ParseError& e) {
    std::cerr << "parse error (position " << e.position() << "): " << e.what() << '\n';
    return 3;
  } catch (const TrainingError& e) {
    std::cerr << "training error at step " << e.step() << ": " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
