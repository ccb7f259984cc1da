// Hot paths at roughly the size of one Facebook ego network.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "commex/alloc.hpp"
#include "commex/dataset.hpp"
#include "commex/embed.hpp"
#include "commex/explore.hpp"
#include "commex/init.hpp"
#include "commex/metrics.hpp"

using namespace commex;

namespace {

Dataset ego_sized(std::size_t n) {
  SyntheticSpec spec;
  spec.n_nodes = n;
  spec.n_communities = 10;
  spec.dim = 224;
  spec.affiliation = 0.8;
  spec.seed = 42;
  return synth_dataset(spec);
}

ObservedNetwork fully_revealed(const Dataset& d) {
  std::vector<NodeId> all(d.network.n_nodes());
  for (NodeId u = 0; u < all.size(); ++u) all[u] = u;
  return ObservedNetwork::from_parts(all.size(), d.network.edges(), {}, all);
}

void BM_GcnForward(benchmark::State& state) {
  const Dataset d = ego_sized(static_cast<std::size_t>(state.range(0)));
  const ObservedNetwork g = fully_revealed(d);
  const ModelParams p = init_params(d.features.dim(), 128, 10, 1);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  for (auto _ : state) benchmark::DoNotOptimize(gcn_forward(adj, d.features, p));
}
BENCHMARK(BM_GcnForward)->Arg(100)->Arg(350)->Unit(benchmark::kMicrosecond);

void BM_LossGradients(benchmark::State& state) {
  const Dataset d = ego_sized(static_cast<std::size_t>(state.range(0)));
  const ObservedNetwork g = fully_revealed(d);
  const ModelParams p = init_params(d.features.dim(), 128, 10, 1);
  const TrainingProblem problem(g, d.features, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradients(p, problem));
}
BENCHMARK(BM_LossGradients)->Arg(100)->Arg(350)->Unit(benchmark::kMillisecond);

void BM_MacCluster(benchmark::State& state) {
  const Dataset d = ego_sized(350);
  const auto c = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mac_cluster(d.features, c, 3));
}
BENCHMARK(BM_MacCluster)->Arg(10)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_SelectMetacode(benchmark::State& state) {
  const Dataset d = ego_sized(350);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  AffiliationMatrix f{Matrix::NullaryExpr(350, 10, [&] { return w(rng); })};
  QueryState st(350, 1.0, 1);
  for (NodeId u = 0; u < static_cast<NodeId>(state.range(0)); ++u) st.record(u * 2, {});
  for (auto _ : state) benchmark::DoNotOptimize(select_metacode(f, st));
}
BENCHMARK(BM_SelectMetacode)->Arg(10)->Arg(140)->Unit(benchmark::kMicrosecond);

void BM_OverlappingNmi(benchmark::State& state) {
  const Dataset d = ego_sized(350);
  const CommunityCover truth = d.network.truth();
  CommunityCover other = truth;
  for (auto& members : other.communities) {
    if (members.size() > 2) members.pop_back();
  }
  for (auto _ : state) benchmark::DoNotOptimize(overlapping_nmi(truth, other, 350));
}
BENCHMARK(BM_OverlappingNmi)->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  commex::tune_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
