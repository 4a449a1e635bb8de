// Acceptance run: one PASS/FAIL line per criterion.
//
//   invrep_acceptance [--full] [--only N[,N...]] [--expect-fail N[,N...]]
//
// Default mode checks the MNIST/MNIST-I criterion on the 10k subsample (trend
// only); --full trains the full data with five seeds. The exit code is nonzero
// when a criterion outside --expect-fail fails or a run throws.
#include "oracles.hpp"

#include "invrep/affinity.hpp"
#include "invrep/data/synthetic.hpp"
#include "invrep/error.hpp"
#include "invrep/metrics.hpp"
#include "invrep/nn/loss.hpp"
#include "invrep/runner/config.hpp"
#include "invrep/runner/experiments.hpp"
#include "invrep/runner/recipes.hpp"
#include "invrep/runner/report.hpp"
#include "invrep/runner/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

using namespace invrep;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Options {
  bool full = false;
  std::set<int> only;
  std::set<int> expect_fail;
};

const std::filesystem::path kConfigs = INVREP_SOURCE_DIR "/configs";

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
  return out;
}

std::string fmt(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool within(double v, double center, double tol) { return std::fabs(v - center) <= tol + 1e-12; }

ExperimentConfig config(const char* file) {
  ExperimentConfig cfg = load_config(kConfigs / file);
  if (cfg.data.root.is_relative() || cfg.data.root == "/root/data") {
    cfg.data.root = INVREP_TEST_DATA_ROOT;
  }
  return cfg;
}

double mean_of(const std::vector<double>& v) { return summarize(v).mean; }

// ---------------------------------------------------------------- 1

Tensor2 gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Tensor2 t(r, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = n(rng);
  return t;
}

// True when no relu pre-activation, L1 coordinate difference of a matched
// pair, or nearest/second-nearest distance gap is within `margin` of a kink.
bool away_from_kinks(const Network& net, const Tensor2& x, const std::vector<int>& y,
                     const std::vector<int>& z, double margin) {
  const ForwardTrace t = forward(net, x);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    if (net.layer(l).activation == Activation::relu &&
        t.pre_activations[l].cwiseAbs().minCoeff() < margin) {
      return false;
    }
  }
  const auto reps = oracle::to_rows(t.activations[net.representation_index()]);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (z[i] != 0) continue;
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (z[j] == 0 || y[j] != y[i]) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < reps[i].size(); ++k) s += std::fabs(reps[i][k] - reps[j][k]);
      d.emplace_back(s, j);
    }
    if (d.empty()) continue;
    std::sort(d.begin(), d.end());
    if (d.size() > 1 && d[1].first - d[0].first < margin) return false;
    for (std::size_t k = 0; k < reps[i].size(); ++k) {
      if (std::fabs(reps[i][k] - reps[d[0].second][k]) < margin) return false;
    }
  }
  return true;
}

Verdict gradient_correctness() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> width(2, 16), batch(2, 8), classes(2, 3), coin(0, 1);
  double worst[3] = {0, 0, 0};
  int checked = 0;
  const double lambda = 0.3;
  while (checked < 200) {
    ArchitectureSpec spec;
    spec.input_width = static_cast<std::size_t>(width(rng));
    const Activation hidden = coin(rng) ? Activation::relu : Activation::sigmoid;
    spec.layers = {{static_cast<std::size_t>(width(rng)), hidden},
                   {static_cast<std::size_t>(width(rng)), hidden},
                   {static_cast<std::size_t>(classes(rng)), Activation::softmax}};
    spec.representation_index = 1;
    Network net = init_network(spec, rng());
    const int n = batch(rng);
    const Tensor2 x = gaussian(n, static_cast<Eigen::Index>(spec.input_width), rng);
    std::vector<int> y(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = i % static_cast<int>(spec.layers.back().width);
      z[static_cast<std::size_t>(i)] = (i / 2) % 2;
    }
    if (!away_from_kinks(net, x, y, z, 1e-3)) continue;
    ++checked;

    auto target = [&] { return cross_entropy_loss(forward(net, x).output(), y).loss; };
    auto affinity = [&] {
      const ForwardTrace t = forward(net, x);
      const auto reps = oracle::to_rows(t.activations[1]);
      return lambda * oracle::affinity_direction(reps, y, z, 0, true, checked % 2 == 0);
    };
    auto total = [&] { return target() + affinity(); };

    AffinityConfig cfg;
    cfg.lambda = lambda;
    cfg.normalization = checked % 2 == 0 ? AffinityNormalization::per_class_mean
                                         : AffinityNormalization::literal;
    const ForwardTrace t = forward(net, x);
    const LossResult ce = cross_entropy_loss(t.output(), y);
    const AffinityResult a = affinity_loss({t.activations[1], y, z}, cfg);
    const GradientSet g_target = backward(net, t, ce.grad_at_output);
    const GradientSet g_aff = backward_from_representation(net, t, lambda * a.grad_at_representation);
    const GradientSet g_total =
        backward_combined(net, t, ce.grad_at_output, lambda * a.grad_at_representation);

    worst[0] = std::max(worst[0], oracle::max_relative_error(
                                      g_target.flatten(), oracle::numeric_gradient(net, target)));
    worst[1] = std::max(worst[1], oracle::max_relative_error(
                                      g_aff.flatten(), oracle::numeric_gradient(net, affinity)));
    worst[2] = std::max(worst[2], oracle::max_relative_error(
                                      g_total.flatten(), oracle::numeric_gradient(net, total)));
  }
  const double w = std::max({worst[0], worst[1], worst[2]});
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d networks, max rel err target %.2e, affinity %.2e, total %.2e (limit 1e-4)",
                checked, worst[0], worst[1], worst[2]);
  return {w < 1e-4, buf};
}

// ---------------------------------------------------------------- 2

Verdict oracle_equivalence() {
  std::mt19937_64 rng(77);
  double worst_aff = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> nd(2, 40), wd(1, 20), cd(1, 10);
    const int n = nd(rng);
    const Tensor2 reps = gaussian(n, wd(rng), rng);
    std::uniform_int_distribution<int> cls(0, cd(rng) - 1), grp(0, 1);
    std::vector<int> y(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = cls(rng);
      z[static_cast<std::size_t>(i)] = grp(rng);
    }
    const auto rows = oracle::to_rows(reps);
    AffinityConfig cfg;
    cfg.class_conditional = trial % 3 != 0;
    cfg.normalization = trial % 2 ? AffinityNormalization::per_class_mean
                                  : AffinityNormalization::literal;
    const bool per_class = cfg.normalization == AffinityNormalization::per_class_mean;
    const double expect =
        oracle::affinity_direction(rows, y, z, 0, cfg.class_conditional, per_class);
    worst_aff = std::max(worst_aff, std::fabs(affinity_loss({reps, y, z}, cfg).loss - expect));
  }

  double worst_metric = 0.0;
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    EvalRecordSet r;
    const int n = 8 + trial % 200;
    for (int i = 0; i < n; ++i) {
      r.predictions.push_back(coin(rng));
      r.truths.push_back(coin(rng));
      r.groups.push_back(coin(rng));
    }
    for (int g = 0; g < 2; ++g)
      for (int t = 0; t < 2; ++t) {
        r.predictions.push_back(t);
        r.truths.push_back(t);
        r.groups.push_back(g);
        r.predictions.push_back(1 - t);
        r.truths.push_back(t);
        r.groups.push_back(g);
      }
    const auto c = oracle::confusion(r.predictions, r.truths, r.groups);
    const FairnessReport f = fairness_report(r);
    double correct = 0;
    for (std::size_t i = 0; i < r.size(); ++i) correct += r.predictions[i] == r.truths[i];
    const double diffs[] = {
        f.accuracy - correct / static_cast<double>(r.size()),
        f.equality_gap_tpr - std::fabs(oracle::tpr(c, 0) - oracle::tpr(c, 1)),
        f.equality_gap_tnr - std::fabs(oracle::tnr(c, 0) - oracle::tnr(c, 1)),
        f.parity_gap - std::fabs(oracle::positive_rate(c, 0) - oracle::positive_rate(c, 1)),
        f.per_group_accuracy[0] - oracle::group_accuracy(c, 0),
        f.per_group_accuracy[1] - oracle::group_accuracy(c, 1)};
    for (double d : diffs) worst_metric = std::max(worst_metric, std::fabs(d));
  }
  const bool pass = worst_aff <= 1e-12 && worst_metric <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "1000 affinity batches max |diff| %.2e, 1000 metric fixtures max |diff| %.2e "
                "(limit 1e-12)",
                worst_aff, worst_metric);
  return {pass, buf};
}

// ---------------------------------------------------------------- 3

Verdict indistinguishability() {
  ExperimentConfig fair = config("synthetic.json");
  fair.data.leak = 0.0;
  const PreparedData d0 = prepare_data(fair);
  std::vector<double> sens0, target0;
  for (std::uint64_t seed : fair.seeds) {
    const RunReport r = run_experiment(fair, seed, d0).report;
    sens0.push_back(r.probe_sensitive_accuracy.value_or(-1));
    target0.push_back(r.probe_target_accuracy.value_or(-1));
  }
  ExperimentConfig leaky = fair;
  leaky.data.leak = 1.0;
  leaky.affinity.lambda = 0.0;
  const PreparedData d1 = prepare_data(leaky);
  std::vector<double> sens1;
  for (std::uint64_t seed : leaky.seeds) {
    sens1.push_back(run_experiment(leaky, seed, d1).report.probe_sensitive_accuracy.value_or(-1));
  }
  const double s0 = mean_of(sens0), t0 = mean_of(target0), s1 = mean_of(sens1);
  const bool pass = s0 >= 0.45 && s0 <= 0.60 && t0 > 0.9 && s1 > 0.9;
  return {pass, "leak=0 lambda=" + fmt(fair.affinity.lambda, 2) + ": probe sensitive " + fmt(s0) +
                    " (need [0.45,0.60]), probe target " + fmt(t0) + " (need >0.9); leak=1 " +
                    "lambda=0: probe sensitive " + fmt(s1) + " (need >0.9)"};
}

// ---------------------------------------------------------------- 4

Verdict mnist_trend(bool full) {
  ExperimentConfig cfg = config(full ? "mnist_inverted.json" : "mnist_inverted_10k.json");
  const PreparedData data = prepare_data(cfg);
  const std::vector<double> lambdas{0.0, 1e-4, 1e-3, 1e-2, 1e-1};
  const SweepTable t = sweep(cfg, SweepAxis::lambda, lambdas, data, [](const std::string& line) {
    std::cerr << "  [4] " << line << '\n';
  });
  std::vector<double> acc, sens;
  std::size_t errors = 0;
  for (const auto& cell : t.cells) {
    acc.push_back(cell.accuracy().mean);
    sens.push_back(cell.probe_sensitive().mean);
    errors += cell.errors.size();
  }
  bool monotone = true;
  for (std::size_t i = 1; i < sens.size(); ++i) monotone &= sens[i] <= sens[i - 1] + 0.02;

  std::string detail = std::string(full ? "full data, " : "10k subsample (trend only), ") +
                       std::to_string(cfg.seeds.size()) + " seed(s); acc/sens per lambda:";
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    detail += " " + fmt(lambdas[i], 4) + "->" + fmt(acc[i]) + "/" + fmt(sens[i]);
  }
  detail += monotone ? "; sensitive decline monotone" : "; sensitive decline NOT monotone";
  bool pass = monotone && errors == 0;
  if (full) {
    const bool g0 = within(acc[0], 0.89, 0.05) && sens[0] >= 0.95;
    const bool g1 = within(acc[3], 0.93, 0.05) && within(sens[3], 0.57, 0.08);
    const bool g2 = acc[4] <= 0.2;
    detail += std::string("; gates lambda=0 ") + (g0 ? "ok" : "missed") + " (acc 0.89+-0.05, sens>=0.95)" +
              ", lambda=0.01 " + (g1 ? "ok" : "missed") + " (acc 0.93+-0.05, sens 0.57+-0.08)" +
              ", lambda=0.1 " + (g2 ? "ok" : "missed") + " (acc<=0.2)";
    pass = pass && g0 && g1 && g2;
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 5, 6

struct AdultSummary {
  std::vector<double> base_acc, base_parity, fair_acc, fair_eq, fair_parity;
  std::vector<double> re_acc, re_eq, re_parity, ratio;
};

const AdultSummary& adult_runs() {
  static const AdultSummary s = [] {
    ExperimentConfig cfg = config("adult.json");
    ExperimentConfig with_z_cfg = cfg;
    with_z_cfg.data.exclude_z = false;
    const PreparedData without_z = prepare_data(cfg);
    const PreparedData with_z = prepare_data(with_z_cfg);
    AdultSummary out;
    for (std::uint64_t seed : cfg.seeds) {
      const AdultStudy st = run_adult_study(cfg, seed, without_z, with_z);
      out.base_acc.push_back(st.baseline_without_z.accuracy);
      out.base_parity.push_back(st.baseline_without_z.parity_gap);
      out.fair_acc.push_back(st.fair.accuracy);
      out.fair_eq.push_back(st.fair.equality_gap_tpr);
      out.fair_parity.push_back(st.fair.parity_gap);
      out.re_acc.push_back(st.reattached.report.accuracy);
      out.re_eq.push_back(st.reattached.report.equality_gap_tpr);
      out.re_parity.push_back(st.reattached.report.parity_gap);
      out.ratio.push_back(st.influence.ratio);
      std::cerr << "  [5/6] seed=" << seed << " fair acc=" << fmt(st.fair.accuracy)
                << " eq=" << fmt(st.fair.equality_gap_tpr) << " parity=" << fmt(st.fair.parity_gap)
                << " ratio=" << fmt(st.influence.ratio) << '\n';
    }
    return out;
  }();
  return s;
}

Verdict adult_table() {
  const AdultSummary& s = adult_runs();
  const double ba = mean_of(s.base_acc), bp = mean_of(s.base_parity);
  const double fa = mean_of(s.fair_acc), fe = mean_of(s.fair_eq), fp = mean_of(s.fair_parity);
  const bool base_ok = within(ba, 0.85, 0.02) && bp >= 0.12;
  const bool fair_ok = within(fa, 0.82, 0.03) && fe <= 0.05 && fp <= 0.10;
  return {base_ok && fair_ok,
          std::to_string(s.base_acc.size()) + " seeds; baseline acc " + fmt(ba) +
              " (0.85+-0.02), parity " + fmt(bp) + " (>=0.12); fair acc " + fmt(fa) +
              " (0.82+-0.03), equality gap " + fmt(fe) + " (<=0.05), parity " + fmt(fp) +
              " (<=0.10)"};
}

Verdict reattachment() {
  const AdultSummary& s = adult_runs();
  const double gain = mean_of(s.re_acc) - mean_of(s.fair_acc);
  const double d_eq = mean_of(s.re_eq) - mean_of(s.fair_eq);
  const double d_par = mean_of(s.re_parity) - mean_of(s.fair_parity);
  const double ratio = mean_of(s.ratio);
  const bool pass = gain >= 0.01 && d_eq > 0.0 && d_par > 0.0 && ratio > 2.0;
  return {pass, "accuracy gain over fair model " + fmt(gain) + " (>=0.01), equality gap change " +
                    fmt(d_eq) + " (>0), parity change " + fmt(d_par) + " (>0), |w_z|/|w_r| " +
                    fmt(ratio, 2) + " (>2)"};
}

// ---------------------------------------------------------------- 7

Verdict domain_adaptation() {
  const ExperimentConfig cfg = config("mnist_rotated.json");
  const DomainData data = prepare_domain_data(cfg);
  std::map<AdaptMode, std::vector<double>> acc;
  for (AdaptMode m : {AdaptMode::source_only, AdaptMode::augmentation_baseline,
                      AdaptMode::source_plus_augmentation, AdaptMode::affinity}) {
    for (std::uint64_t seed : cfg.seeds) {
      acc[m].push_back(run_domain_adaptation(cfg, m, seed, data).report.accuracy);
      std::cerr << "  [7] " << adapt_mode_name(m) << " seed=" << seed << " acc=" << fmt(acc[m].back())
                << '\n';
    }
  }
  const double so = mean_of(acc[AdaptMode::source_only]);
  const double aug = mean_of(acc[AdaptMode::augmentation_baseline]);
  const double both = mean_of(acc[AdaptMode::source_plus_augmentation]);
  const double aff = mean_of(acc[AdaptMode::affinity]);
  const bool pass = within(so, 0.67, 0.06) && aff >= aug && aff >= 0.76 && within(aff, 0.82, 0.06);
  return {pass, std::to_string(cfg.seeds.size()) + " seeds; source only " + fmt(so) +
                    " (0.67+-0.06), augmentation baseline " + fmt(aug) + ", affinity " + fmt(aff) +
                    " (>= baseline, >=0.76, 0.82+-0.06); info: source+augmentation " + fmt(both)};
}

// ---------------------------------------------------------------- 8

Verdict determinism() {
  std::vector<std::string> mismatched;
  auto strip = [](const std::string& report) {
    std::istringstream in(report);
    std::string line, out;
    while (std::getline(in, line))
      if (line.rfind("wall_seconds=", 0) != 0) out += line + '\n';
    return out;
  };
  auto check = [&](const std::string& name, const std::function<std::string()>& run) {
    if (run() != run()) mismatched.push_back(name);
  };

  ExperimentConfig syn = config("synthetic.json");
  const PreparedData syn_data = prepare_data(syn);
  check("synthetic", [&] { return strip(format_run_report(run_experiment(syn, 1, syn_data).report)); });

  ExperimentConfig mn = config("mnist_inverted_10k.json");
  mn.data.train_subsample = 1000;
  mn.data.test_subsample = 500;
  mn.epochs = 2;
  mn.probe.epochs = 2;
  check("mnist_inverted", [&] {
    return strip(format_run_report(run_experiment(mn, 1, prepare_data(mn)).report));
  });

  ExperimentConfig ad = config("adult.json");
  ad.epochs = 2;
  ad.probe.epochs = 2;
  const PreparedData ad_data = prepare_data(ad);
  check("adult", [&] { return strip(format_run_report(run_experiment(ad, 1, ad_data).report)); });

  ExperimentConfig da = config("mnist_rotated.json");
  da.data.source_samples = 1000;
  da.epochs = 2;
  const DomainData da_data = prepare_domain_data(da);
  for (AdaptMode m : {AdaptMode::augmentation_baseline, AdaptMode::affinity}) {
    check(std::string("mnist_rotated/") + std::string(adapt_mode_name(m)), [&] {
      return strip(format_run_report(run_domain_adaptation(da, m, 1, da_data).report));
    });
  }
  std::string detail = "identical reports for synthetic, mnist_inverted, adult, mnist_rotated";
  if (!mismatched.empty()) {
    detail = "reports differ for:";
    for (const auto& m : mismatched) detail += " " + m;
  }
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
#endif
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--full") {
      opt.full = true;
    } else if (a == "--only" && i + 1 < argc) {
      opt.only = parse_list(argv[++i]);
    } else if (a == "--expect-fail" && i + 1 < argc) {
      opt.expect_fail = parse_list(argv[++i]);
    } else {
      std::cerr << "usage: " << argv[0] << " [--full] [--only N,..] [--expect-fail N,..]\n";
      return 2;
    }
  }

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"oracle equivalence", oracle_equivalence},
      {"indistinguishability", indistinguishability},
      {"MNIST/MNIST-I lambda trend", [&] { return mnist_trend(opt.full); }},
      {"Adult fairness table", adult_table},
      {"Adult reattachment", reattachment},
      {"MNIST->MNIST-R adaptation", domain_adaptation},
      {"determinism", determinism},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!opt.only.empty() && !opt.only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expected_fail = opt.expect_fail.count(id) > 0;
    std::cout << "criterion " << id << " [" << criteria[i].first << "]: "
              << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << " (" << fmt(secs, 1) << " s)"
              << (!v.pass && expected_fail ? " [known]" : "") << std::endl;
    if (!v.pass && !expected_fail) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
