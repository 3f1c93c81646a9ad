#include "sparsepbn/analysis.hpp"
#include "sparsepbn/baselines.hpp"
#include "sparsepbn/examples.hpp"
#include "sparsepbn/momp.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

using namespace sparsepbn;

namespace {

const std::vector<std::string> kNames{"p1", "p2", "p3a", "p3b", "p4", "p5", "p6"};

void BM_MompExample(benchmark::State& state) {
  const std::string& name = kNames[static_cast<std::size_t>(state.range(0))];
  const auto p = load_example(name);
  const int m = p.dim() * p.dim();
  const auto stop = name == "p6" ? StoppingCriteria::large_profile(m)
                                 : StoppingCriteria::default_profile(m);
  for (auto _ : state) {
    auto r = momp_run(p, InitSpec::zero(), stop);
    benchmark::DoNotOptimize(r.solution);
  }
  state.SetLabel(name);
}
BENCHMARK(BM_MompExample)->DenseRange(0, 6)->Unit(benchmark::kMicrosecond);

void BM_CorrelationArgmax(benchmark::State& state) {
  const auto p = load_example("p6");
  const auto d = ColumnSupportDictionary::build(p);
  for (auto _ : state) {
    auto c = correlation_argmax(p.entries(), d);
    benchmark::DoNotOptimize(c.score);
  }
}
BENCHMARK(BM_CorrelationArgmax);

void BM_PgP1(benchmark::State& state) {
  const auto p = load_example("p1");
  for (auto _ : state) {
    auto r = pg_run(p, PgConfig{});
    benchmark::DoNotOptimize(r.dense);
  }
}
BENCHMARK(BM_PgP1)->Unit(benchmark::kMicrosecond);

void BM_ImplicitGradP6(benchmark::State& state) {
  const auto p = load_example("p6");
  const auto d = ColumnSupportDictionary::build(p);
  const auto n = static_cast<Eigen::Index>(*d.atom_count());
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) {
    auto g = implicit_grad(p, d, x);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_ImplicitGradP6)->Unit(benchmark::kMicrosecond);

void BM_PlantedMomp(benchmark::State& state) {
  const auto inst = plant_instance(static_cast<int>(state.range(0)), 3, 5, 11);
  const int m = inst.p.dim() * inst.p.dim();
  for (auto _ : state) {
    auto r = momp_run(inst.p, InitSpec::zero(), StoppingCriteria::default_profile(m));
    benchmark::DoNotOptimize(r.solution);
  }
}
BENCHMARK(BM_PlantedMomp)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
