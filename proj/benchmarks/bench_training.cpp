#include <benchmark/benchmark.h>

#include "invrep/affinity.hpp"
#include "invrep/nn/loss.hpp"
#include "invrep/nn/network.hpp"
#include "invrep/nn/optimizer.hpp"

#include <random>
#include <vector>

using namespace invrep;

namespace {

Network mnist_net() {
  ArchitectureSpec spec;
  spec.input_width = 784;
  spec.layers = {{128, Activation::relu}, {128, Activation::relu}, {20, Activation::relu},
                 {10, Activation::softmax}};
  spec.representation_index = 2;
  return init_network(spec, 1);
}

Tensor2 random_batch(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor2 t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
  return t;
}

std::vector<int> cyclic(std::size_t n, int mod) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i) % mod;
  return v;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const Network net = mnist_net();
  const Tensor2 x = random_batch(state.range(0), 784, 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(128)->Arg(512);

static void BM_TrainStep(benchmark::State& state) {
  Network net = mnist_net();
  Optimizer opt(OptimizerSettings{});
  const Tensor2 x = random_batch(state.range(0), 784, 3);
  const auto y = cyclic(static_cast<std::size_t>(state.range(0)), 10);
  const auto z = cyclic(static_cast<std::size_t>(state.range(0)), 2);
  const bool with_affinity = state.range(1) != 0;
  AffinityConfig cfg;
  for (auto _ : state) {
    const ForwardTrace trace = forward(net, x);
    const LossResult ce = cross_entropy_from_logits(trace.logits(), y);
    GradientSet g;
    if (with_affinity) {
      const AffinityResult a = affinity_loss(GroupedBatch{trace.activations[2], y, z}, cfg);
      g = backward_combined(net, trace, ce.grad_at_output, cfg.lambda * a.grad_at_representation);
    } else {
      g = backward(net, trace, ce.grad_at_output);
    }
    apply_update(net, g, opt);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Args({128, 0})->Args({128, 1})->Args({512, 1});

static void BM_AffinityLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 reps = random_batch(state.range(0), 20, 4);
  const auto y = cyclic(n, 10);
  const auto z = cyclic(n, 2);
  AffinityConfig cfg;
  cfg.direction = state.range(1) != 0 ? AffinityDirection::symmetric_mean
                                      : AffinityDirection::anchor_group_0;
  for (auto _ : state) benchmark::DoNotOptimize(affinity_loss(GroupedBatch{reps, y, z}, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AffinityLoss)->Args({128, 0})->Args({512, 0})->Args({512, 1});

static void BM_NearestNeighborL1(benchmark::State& state) {
  const Tensor2 pool = random_batch(state.range(0), 20, 5);
  const Tensor2 q = random_batch(1, 20, 6);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbor_l1(row_span(q, 0), pool));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestNeighborL1)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
