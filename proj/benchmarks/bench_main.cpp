#include <benchmark/benchmark.h>

#include <random>

#include "couplerlab/dense.hpp"
#include "couplerlab/link.hpp"
#include "couplerlab/mna.hpp"
#include "couplerlab/star_star.hpp"
#include "couplerlab/sweep.hpp"

using namespace couplerlab;

namespace {

CMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  CMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = Complex(u(), u());
    a(r, r) += static_cast<double>(n);
  }
  return a;
}

void bm_lu_factor_solve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CMatrix a = random_matrix(n, 1);
  const CVector b(n, Complex(1.0));
  for (auto _ : state) {
    const LuDecomposition lu(a);
    benchmark::DoNotOptimize(lu.solve(b));
  }
}
BENCHMARK(bm_lu_factor_solve)->Arg(8)->Arg(32)->Arg(64)->Arg(128);

void bm_link_assemble_solve(benchmark::State& state) {
  const auto net = coupler::connect_back_to_back(coupler::BackToBackSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(circuit::solve(net, 10e6));
}
BENCHMARK(bm_link_assemble_solve);

void bm_link_monolithic(benchmark::State& state) {
  const cascade::LinkModel model(coupler::BackToBackSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(model.monolithic(10e6));
}
BENCHMARK(bm_link_monolithic);

void bm_link_cascaded(benchmark::State& state) {
  const cascade::LinkModel model(coupler::BackToBackSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(model.cascaded(10e6));
}
BENCHMARK(bm_link_cascaded);

void bm_frequency_sweep_601(benchmark::State& state) {
  const cascade::LinkModel model(coupler::BackToBackSpec{});
  const auto f = sweep::FrequencyGrid{}.values();
  for (auto _ : state)
    benchmark::DoNotOptimize(sweep::frequency_sweep(model, f, {.threads = static_cast<unsigned>(state.range(0))}));
}
BENCHMARK(bm_frequency_sweep_601)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void bm_closed_form(benchmark::State& state) {
  oracle::StarStarCase c;
  c.source_impedances = {Complex(50, 1), Complex(75, -2), Complex(100, 3)};
  for (auto _ : state) benchmark::DoNotOptimize(oracle::solve_star_star(c));
}
BENCHMARK(bm_closed_form);

}  // namespace
BENCHMARK_MAIN();
