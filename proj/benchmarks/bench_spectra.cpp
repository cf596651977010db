#include <benchmark/benchmark.h>

#include "resonalens/oracle.hpp"
#include "resonalens/spectra.hpp"
#include "resonalens/tcert.hpp"

using namespace resonalens;

namespace {

void BM_SolveGevp(benchmark::State& state) {
  const auto p = make_profile({ProfileKind::Affine, 3.0, 1, 1.0});
  const auto mesh = build_mesh(1.0, 5.0, static_cast<int>(state.range(0)), 3, std::nullopt, coefficient_kinks(p));
  const auto mm = assemble_mode(mesh, p, 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_gevp(mm.S, mm.M));
  state.counters["dofs"] = mesh.dofs();
}
BENCHMARK(BM_SolveGevp)->Arg(16)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const auto p = make_profile({ProfileKind::Affine, 3.0, 1, 1.0});
  const auto mesh = build_mesh(1.0, 4.0, static_cast<int>(state.range(0)), 2, std::nullopt, coefficient_kinks(p));
  for (auto _ : state) benchmark::DoNotOptimize(coercivity_certificate(mesh, p, 2, {0.866, -1.5}));
}
BENCHMARK(BM_Certificate)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_HankelResonances(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hankel_resonances(n, 1.0));
}
BENCHMARK(BM_HankelResonances)->Arg(2)->Arg(10)->Arg(25);

}  // namespace
