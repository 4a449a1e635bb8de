#ifndef INVREP_DATA_SAMPLER_HPP
#define INVREP_DATA_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace invrep {

enum class BatchPolicy { shuffled, group_stratified };

std::string_view batch_policy_name(BatchPolicy p);
BatchPolicy parse_batch_policy(std::string_view name);

struct BatchSampler {
  std::size_t batch_size = 128;
  BatchPolicy policy = BatchPolicy::group_stratified;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Row indices of every mini-batch in one epoch. Every index appears exactly
/// once; the last batch may be short.
///
/// `group_stratified` spreads each group evenly over the epoch and places at
/// least one row of each group in every batch while both groups still have
/// rows left. Identical (groups, sampler, epoch) give identical batches.
std::vector<std::vector<std::size_t>> epoch_batches(std::span<const int> groups,
                                                    const BatchSampler& sampler,
                                                    std::size_t epoch);

}  // namespace invrep

#endif  // INVREP_DATA_SAMPLER_HPP
