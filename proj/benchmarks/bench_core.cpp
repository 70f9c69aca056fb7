#include <benchmark/benchmark.h>

#include "autolabel/adapter.hpp"
#include "autolabel/clustering.hpp"
#include "autolabel/discovery.hpp"
#include "autolabel/matching.hpp"
#include "autolabel/rng.hpp"

using namespace autolabel;

namespace {

std::vector<Vector> unit_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  SplitMix64 r(seed);
  std::vector<Vector> pts(n, Vector(d));
  for (auto& p : pts) {
    for (auto& x : p) x = r.gaussian();
    p = l2_normalize(p);
  }
  return pts;
}

void BM_KMeans(benchmark::State& state) {
  const auto pts = unit_points(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans_fit(pts, {16, 7, 100}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AttributeSim(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  std::vector<AttributeIndex> a(t);
  std::vector<AttributeIndex> b(t);
  for (std::size_t i = 0; i < t; ++i) {
    a[i] = static_cast<AttributeIndex>(i);
    b[i] = static_cast<AttributeIndex>(t - 1 - i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(attribute_sim(a, b));
}
BENCHMARK(BM_AttributeSim)->Arg(5)->Arg(50);

void BM_Tfidf(benchmark::State& state) {
  SplitMix64 r(2);
  std::vector<AttributeDocument> docs;
  for (std::size_t c = 0; c < static_cast<std::size_t>(state.range(0)); ++c) {
    AttributeDocument doc{c, {}};
    for (int i = 0; i < 400; ++i) ++doc.counts[static_cast<AttributeIndex>(r.below(500))];
    docs.push_back(std::move(doc));
  }
  for (auto _ : state) benchmark::DoNotOptimize(tfidf_scores(docs));
}
BENCHMARK(BM_Tfidf)->Arg(16)->Arg(128);

void BM_ContrastiveGrad(benchmark::State& state) {
  const std::size_t d = 64;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xs = unit_points(n, d, 3);
  const auto labels = unit_points(10, d, 4);
  std::vector<TrainingSample> batch;
  for (std::size_t i = 0; i < n; ++i) batch.push_back({xs[i], i % labels.size()});
  const auto params = AdapterParams::identity(d);
  for (auto _ : state) benchmark::DoNotOptimize(contrastive_grad(params, batch, labels, 0.01, 1e-3));
}
BENCHMARK(BM_ContrastiveGrad)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
