#include "wulffgrid/lattice_energy.hpp"
#include "wulffgrid/multigrid.hpp"
#include "wulffgrid/qc_energy.hpp"
#include "wulffgrid/wulff.hpp"

#include <benchmark/benchmark.h>

using namespace wulffgrid;

namespace {

ConvexPolytope unit_square() { return box_polytope(Vec::Zero(2), Vec::Ones(2)); }

void BM_CrystalRecoveryEnergy(benchmark::State& state)
{
    const auto V = nearest_neighbour(2);
    const auto disk = regular_polygon(512, 1.0);
    for (auto _ : state) {
        const auto r = recovery_configuration(disk, state.range(0));
        benchmark::DoNotOptimize(surface_energy(r.config, V));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrystalRecoveryEnergy)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SignedWulffOctahedron(benchmark::State& state)
{
    const auto phi = fcc_minus_axes(0.75);
    for (auto _ : state) benchmark::DoNotOptimize(signed_wulff(phi));
}
BENCHMARK(BM_SignedWulffOctahedron)->Unit(benchmark::kMicrosecond);

void BM_ParameterScan(benchmark::State& state)
{
    const auto grid = scan_grid(0.30, 1.20, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(parameter_scan(fcc_minus_axes, grid));
}
BENCHMARK(BM_ParameterScan)->Unit(benchmark::kMillisecond);

void BM_DualPointEnumeration(benchmark::State& state)
{
    const Multigrid mg(pentagrid(1));
    const auto region = Region::ball(Vec::Zero(2), static_cast<double>(state.range(0)));
    std::size_t n = 0;
    for (auto _ : state) {
        n = 0;
        mg.for_each_point(region, [&](const DualPoint&) { ++n; });
        benchmark::DoNotOptimize(n);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(n));
}
BENCHMARK(BM_DualPointEnumeration)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_VerifyTiling(benchmark::State& state)
{
    const auto spec = pentagrid(1);
    for (auto _ : state) benchmark::DoNotOptimize(verify_tiling(spec, Region::ball(Vec::Zero(2), 30), 10000));
}
BENCHMARK(BM_VerifyTiling)->Unit(benchmark::kMillisecond);

void BM_QcRecoveryEnergy(benchmark::State& state)
{
    const Multigrid mg(pentagrid(1));
    const auto W = rail_weights(mg, uniform_tile_weight(mg));
    for (auto _ : state) {
        const auto r = qc_recovery(unit_square(), static_cast<std::size_t>(state.range(0)), mg);
        benchmark::DoNotOptimize(rescaled_tile_energy(mg, r.X, W));
    }
}
BENCHMARK(BM_QcRecoveryEnergy)->Arg(1000)->Arg(16000)->Unit(benchmark::kMillisecond);

}  // namespace

// the distro benchmark_main archive is LTO bytecode from another compiler release
BENCHMARK_MAIN();
