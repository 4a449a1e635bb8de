#include "invrep/data/sampler.hpp"

#include "invrep/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace invrep {

std::string_view batch_policy_name(BatchPolicy p) {
  return p == BatchPolicy::shuffled ? "shuffled" : "group_stratified";
}

BatchPolicy parse_batch_policy(std::string_view name) {
  if (name == "shuffled") return BatchPolicy::shuffled;
  if (name == "group_stratified") return BatchPolicy::group_stratified;
  throw ConfigError("unknown batch policy '" + std::string(name) + "'");
}

void BatchSampler::validate() const {
  if (batch_size < 2) throw ConfigError("batch size must be >= 2");
}

std::vector<std::vector<std::size_t>> epoch_batches(std::span<const int> groups,
                                                    const BatchSampler& sampler,
                                                    std::size_t epoch) {
  sampler.validate();
  const std::size_t n = groups.size();
  if (sampler.batch_size > n) {
    throw InputError("batch size " + std::to_string(sampler.batch_size) +
                     " exceeds dataset size " + std::to_string(n));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(sampler.seed),
                    static_cast<std::uint32_t>(sampler.seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x5a17u};
  std::mt19937_64 rng(seq);
  const std::size_t b = sampler.batch_size;
  std::vector<std::vector<std::size_t>> batches;
  batches.reserve((n + b - 1) / b);

  if (sampler.policy == BatchPolicy::shuffled) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t s = 0; s < n; s += b) {
      batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(s),
                           idx.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + b)));
    }
    return batches;
  }

  std::array<std::vector<std::size_t>, 2> pools;
  for (std::size_t i = 0; i < n; ++i) {
    if (groups[i] != 0 && groups[i] != 1) {
      throw InputError("group id at row " + std::to_string(i) + " is not 0 or 1");
    }
    pools[static_cast<std::size_t>(groups[i])].push_back(i);
  }
  for (auto& p : pools) std::shuffle(p.begin(), p.end(), rng);

  const std::size_t n0 = pools[0].size();
  std::size_t used0 = 0;
  std::size_t used1 = 0;
  std::size_t emitted = 0;
  while (emitted < n) {
    const std::size_t size = std::min(b, n - emitted);
    const std::size_t rem0 = n0 - used0;
    const std::size_t rem1 = pools[1].size() - used1;
    // Cumulative rounding keeps group 0's share proportional across the epoch.
    const auto target_cum = static_cast<std::size_t>(std::llround(
        static_cast<double>(n0) * static_cast<double>(emitted + size) / static_cast<double>(n)));
    std::size_t q0 = target_cum > used0 ? target_cum - used0 : 0;
    const std::size_t lo = (rem0 > 0 && rem1 > 0) ? 1 : 0;
    const std::size_t hi = std::min(rem0, size - ((rem1 > 0 && rem0 > 0) ? 1 : 0));
    q0 = std::clamp(q0, std::min(lo, hi), hi);
    std::size_t q1 = size - q0;
    if (q1 > rem1) {
      q1 = rem1;
      q0 = size - q1;
    }
    std::vector<std::size_t> batch;
    batch.reserve(size);
    batch.insert(batch.end(), pools[0].begin() + static_cast<std::ptrdiff_t>(used0),
                 pools[0].begin() + static_cast<std::ptrdiff_t>(used0 + q0));
    batch.insert(batch.end(), pools[1].begin() + static_cast<std::ptrdiff_t>(used1),
                 pools[1].begin() + static_cast<std::ptrdiff_t>(used1 + q1));
    used0 += q0;
    used1 += q1;
    emitted += size;
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace invrep
