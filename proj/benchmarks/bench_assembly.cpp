#include <benchmark/benchmark.h>

#include "resonalens/radialfem.hpp"
#include "resonalens/tcert.hpp"

using namespace resonalens;

namespace {

Profile affine3() { return make_profile({ProfileKind::Affine, 3.0, 1, 1.0}); }

void BM_AssembleMode(benchmark::State& state) {
  const auto p = affine3();
  const auto mesh = build_mesh(1.0, 5.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                               std::nullopt, coefficient_kinks(p));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mode(mesh, p, 2));
  state.counters["dofs"] = mesh.dofs();
}
BENCHMARK(BM_AssembleMode)->Args({48, 2})->Args({48, 3})->Args({192, 3})->Unit(benchmark::kMicrosecond);

void BM_AssembleExact(benchmark::State& state) {
  const auto p = affine3();
  const ExactMapSpec map{MapKind::Log, -0.5, 2.0};
  const auto mesh = build_mesh(1.0, 2.0, static_cast<int>(state.range(0)), 3, map, coefficient_kinks(p, map));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mode(mesh, p, 2));
}
BENCHMARK(BM_AssembleExact)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Commutator(benchmark::State& state) {
  const auto p = make_profile({ProfileKind::Power, 0.25, 2, 1.0});
  const auto sym = smooth_symbol(t_symbol(p, {0.8660254037844386, -1.5}), 0.05, 1.0625, 3.875, {1.0, 4.0});
  auto align = coefficient_kinks(p);
  align.push_back(1.0625);
  align.push_back(3.875);
  const auto mesh = build_mesh(1.0, 4.0, static_cast<int>(state.range(0)), 2, std::nullopt, align);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_commutator_norm(mesh, p, sym, 0));
}
BENCHMARK(BM_Commutator)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

}  // namespace
