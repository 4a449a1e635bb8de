#ifndef INVREP_RUNNER_REPORT_HPP
#define INVREP_RUNNER_REPORT_HPP

#include "invrep/data/dataset.hpp"
#include "invrep/runner/experiments.hpp"
#include "invrep/runner/trainer.hpp"

#include <filesystem>
#include <string>

namespace invrep {

// Reports are flat text: `key=value` lines for scalars and CSV for tables.
// Doubles are written with 17 significant digits so equal runs give equal
// files (apart from wall_seconds).

std::string format_run_report(const RunReport& report);
/// epoch,target,affinity,total
std::string format_epoch_csv(const RunReport& report);
/// value,runs,errors,accuracy_mean,accuracy_std,probe_target_mean,...
std::string format_sweep_csv(const SweepTable& table);
std::string format_adult_study(const AdultStudy& study);
/// bin_lo,bin_hi,count_z0,count_z1
std::string format_histogram_csv(const HistogramPair& hist);

/// Writes report.txt, epochs.csv, config.json and network.json into `dir`.
void write_run(const RunOutcome& run, const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// One row per sample: r0,...,r{k-1},y,z with a header line.
std::string embeddings_csv(const Network& net, const Dataset& data);
void dump_embeddings(const Network& net, const Dataset& data, const std::filesystem::path& path);

}  // namespace invrep

#endif  // INVREP_RUNNER_REPORT_HPP
