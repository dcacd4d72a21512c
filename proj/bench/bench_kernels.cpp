// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <vector>

#include "tdi/bounds.hpp"
#include "tdi/expsums.hpp"
#include "tdi/solver.hpp"

namespace {

using namespace tdi;

const Params& params_for(double X) {
  static std::vector<std::pair<double, Params>> cache;
  for (const auto& [x, p] : cache)
    if (x == X) return p;
  cache.emplace_back(X, derive_params(1.01, 1.02, 0.001, N_for_X(X, 1.01), 2.0, 0.25));
  return cache.back().second;
}

std::vector<double> grid(const Params& p, int n) {
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = -p.P + 2.0 * p.P * i / (n - 1);
  return a;
}

template <bool Parallel>
void BM_grid_eval(benchmark::State& state) {
  const Params& p = params_for(static_cast<double>(state.range(0)));
  const PrimeTable t = build_table(p);
  const auto alphas = grid(p, 256);
  SumRequest req{SumKind::V, 0, make_cup(p.Y, p.r), 0};
  for (auto _ : state) {
    auto v = Parallel ? grid_eval(t, req, alphas) : grid_eval_serial(t, req, alphas);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void BM_find_triples(benchmark::State& state) {
  const Params& p = params_for(static_cast<double>(state.range(0)));
  const PrimeTable t = build_table(p);
  for (auto _ : state) {
    auto r = Parallel ? find_triples(t, p.N, p.eps, p.Y) : find_triples_serial(t, p.N, p.eps, p.Y);
    benchmark::DoNotOptimize(r.gamma);
  }
}

template <bool Parallel>
void BM_i1_direct(benchmark::State& state) {
  const Params& p = params_for(static_cast<double>(state.range(0)));
  const PrimeTable t = build_table(p);
  const CupFunction f = make_cup(p.Y, p.r);
  const SelbergMinorant s = make_minorant(p.mu);
  for (auto _ : state) {
    auto r = Parallel ? i1_direct(t, f, s, p.N, p.eps) : i1_direct_serial(t, f, s, p.N, p.eps);
    benchmark::DoNotOptimize(r.value);
  }
}

template <bool Parallel>
void BM_l2_closed_form(benchmark::State& state) {
  const Params& p = params_for(static_cast<double>(state.range(0)));
  const PrimeTable t = build_table(p);
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = t.entries[i].logp;
  for (auto _ : state) {
    double v = Parallel ? l2_closed_form(t, w, p.P) : l2_closed_form_serial(t, w, p.P);
    benchmark::DoNotOptimize(v);
  }
}

BENCHMARK(BM_grid_eval<false>)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid_eval<true>)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_find_triples<false>)->Arg(20000)->Arg(80000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_find_triples<true>)->Arg(20000)->Arg(80000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_i1_direct<false>)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_i1_direct<true>)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_l2_closed_form<false>)->Arg(10000)->Arg(30000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_l2_closed_form<true>)->Arg(10000)->Arg(30000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
