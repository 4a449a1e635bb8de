#include "invrep/runner/report.hpp"

#include "invrep/error.hpp"
#include "invrep/nn/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace invrep {

namespace {

std::ostringstream stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

void fairness_lines(std::ostream& os, const std::string& prefix, const FairnessReport& f) {
  os << prefix << "accuracy=" << f.accuracy << '\n'
     << prefix << "parity_gap=" << f.parity_gap << '\n'
     << prefix << "equality_gap_tpr=" << f.equality_gap_tpr << '\n'
     << prefix << "equality_gap_tnr=" << f.equality_gap_tnr << '\n';
  for (int g = 0; g < 2; ++g) {
    os << prefix << "accuracy_z" << g << '=' << f.per_group_accuracy[static_cast<std::size_t>(g)]
       << '\n'
       << prefix << "positive_rate_z" << g << '='
       << f.per_group_positive_rate[static_cast<std::size_t>(g)] << '\n';
  }
}

}  // namespace

std::string format_run_report(const RunReport& r) {
  auto os = stream();
  os << "name=" << r.name << '\n'
     << "recipe=" << r.recipe << '\n'
     << "mode=" << r.mode << '\n'
     << "seed=" << r.seed << '\n'
     << "lambda=" << r.lambda << '\n'
     << "evaluation_split=" << r.evaluation_split << '\n'
     << "positive_class=1\n"
     << "train_rows=" << r.train_rows << '\n'
     << "eval_rows=" << r.eval_rows << '\n'
     << "epochs=" << r.epochs.size() << '\n'
     << "steps=" << r.steps << '\n'
     << "degenerate_batches=" << r.degenerate_batches << '\n';
  if (!r.epochs.empty()) {
    os << "final_target_loss=" << r.epochs.back().target << '\n'
       << "final_affinity_loss=" << r.epochs.back().affinity << '\n'
       << "final_total_loss=" << r.epochs.back().total << '\n';
  }
  os << "accuracy=" << r.accuracy << '\n';
  if (r.fairness) fairness_lines(os, "", *r.fairness);
  if (r.probe_target_accuracy) os << "probe_target_accuracy=" << *r.probe_target_accuracy << '\n';
  if (r.probe_sensitive_accuracy) {
    os << "probe_sensitive_accuracy=" << *r.probe_sensitive_accuracy << '\n';
  }
  for (const auto& w : r.warnings) os << "warning=" << w << '\n';
  os << "wall_seconds=" << std::setprecision(4) << r.wall_seconds << '\n';
  return os.str();
}

std::string format_epoch_csv(const RunReport& r) {
  auto os = stream();
  os << "epoch,target,affinity,total\n";
  for (std::size_t i = 0; i < r.epochs.size(); ++i) {
    os << i << ',' << r.epochs[i].target << ',' << r.epochs[i].affinity << ','
       << r.epochs[i].total << '\n';
  }
  return os.str();
}

std::string format_sweep_csv(const SweepTable& t) {
  auto os = stream();
  os << sweep_axis_name(t.axis)
     << ",runs,errors,accuracy_mean,accuracy_std,probe_target_mean,probe_target_std,"
        "probe_sensitive_mean,probe_sensitive_std\n";
  for (const auto& c : t.cells) {
    const Summary a = c.accuracy();
    const Summary pt = c.probe_target();
    const Summary ps = c.probe_sensitive();
    os << c.value << ',' << c.runs.size() << ',' << c.errors.size() << ',' << a.mean << ','
       << a.stddev << ',' << pt.mean << ',' << pt.stddev << ',' << ps.mean << ',' << ps.stddev
       << '\n';
  }
  return os.str();
}

std::string format_adult_study(const AdultStudy& s) {
  auto os = stream();
  fairness_lines(os, "baseline_without_z.", s.baseline_without_z);
  fairness_lines(os, "baseline_with_z.", s.baseline_with_z);
  fairness_lines(os, "fair.", s.fair);
  os << "fair.probe_income_accuracy=" << s.fair_probe.target_accuracy << '\n'
     << "fair.probe_sex_accuracy=" << s.fair_probe.sensitive_accuracy << '\n';
  fairness_lines(os, "fair_head.", s.fair_head.report);
  fairness_lines(os, "reattached.", s.reattached.report);
  os << "reattached.w_r=" << s.influence.w_r << '\n'
     << "reattached.w_z=" << s.influence.w_z << '\n'
     << "reattached.influence_ratio=" << s.influence.ratio << '\n'
     << "reattached.r_group_mean_gap=" << s.reattached.r_group_mean_gap << '\n'
     << "reattached.independence_warning=" << (s.reattached.independence_warning ? 1 : 0) << '\n'
     << "r_histogram.overlap=" << s.r_histogram.overlap() << '\n';
  return os.str();
}

std::string format_histogram_csv(const HistogramPair& h) {
  auto os = stream();
  os << "bin_lo,bin_hi,count_z0,count_z1\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    os << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[0][b] << ',' << h.counts[1][b]
       << '\n';
  }
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

void write_run(const RunOutcome& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.txt", format_run_report(run.report));
  write_text_file(dir / "epochs.csv", format_epoch_csv(run.report));
  write_text_file(dir / "config.json", run.report.config_json + "\n");
  save_network(run.net, dir / "network.json");
}

std::string embeddings_csv(const Network& net, const Dataset& data) {
  const Tensor2 rep = representation(net, data.features);
  auto os = stream();
  for (Eigen::Index j = 0; j < rep.cols(); ++j) os << 'r' << j << ',';
  os << "y,z\n";
  for (Eigen::Index i = 0; i < rep.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.cols(); ++j) os << rep(i, j) << ',';
    os << data.targets[static_cast<std::size_t>(i)] << ','
       << data.groups[static_cast<std::size_t>(i)] << '\n';
  }
  return os.str();
}

void dump_embeddings(const Network& net, const Dataset& data, const std::filesystem::path& path) {
  write_text_file(path, embeddings_csv(net, data));
}

}  // namespace invrep
