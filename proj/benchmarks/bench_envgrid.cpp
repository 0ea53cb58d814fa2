#include <auvsim/envgrid.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

namespace {

using namespace auvsim;

std::vector<double> uneven(std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = lo + (hi - lo) * s * s;
  }
  return v;
}

// range(0) = points per spatial axis; t has 10 slices, z has 10 levels.
void BM_EnvGridQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto grid = env::EnvGrid::sample("f", uneven(10, 0.0, 86400.0), uneven(n, -5000.0, 5000.0),
                                         uneven(n, -5000.0, 5000.0), uneven(10, -500.0, 0.0),
                                         [](double t, double x, double y, double z) {
                                           return std::sin(1e-4 * t) + 1e-3 * x * y + z;
                                         });
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ut(0.0, 86400.0), uxy(-5000.0, 5000.0), uz(-500.0, 0.0);
  std::vector<std::pair<double, Vec3>> queries;
  for (int i = 0; i < 4096; ++i) queries.emplace_back(ut(rng), Vec3(uxy(rng), uxy(rng), uz(rng)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [t, p] = queries[i++ & 4095];
    benchmark::DoNotOptimize(grid.value(t, p));
  }
  state.counters["values"] = static_cast<double>(grid.values().size());
}
BENCHMARK(BM_EnvGridQuery)->Arg(10)->Arg(100)->Arg(316);

void BM_AxisBracket(benchmark::State& state) {
  const env::AxisIndex axis(uneven(static_cast<std::size_t>(state.range(0)), 0.0, 1000.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> qs(4096);
  for (auto& q : qs) q = u(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(axis.bracket(qs[i++ & 4095]));
}
BENCHMARK(BM_AxisBracket)->Arg(16)->Arg(256)->Arg(4096);

}  // namespace
