#include "divcol/verify.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_assemble_vvp_2d(benchmark::State& state) {
    const int mesh = static_cast<int>(state.range(0));
    const divcol::ManufacturedCase2D mc = divcol::vortex_2d(1.0, 1.0);
    const divcol::CaseDefinition2D c =
        divcol::make_vortex_case_2d(mc, divcol::Formulation::VVP, 2, mesh);
    const divcol::DofMap dm = divcol::build_dof_map(c);
    const divcol::DiscreteSolution2D s = divcol::zero_solution(c, dm);
    for (auto _ : state) {
        const divcol::AssemblyResult res = divcol::assemble_2d(c, dm, s, true);
        benchmark::DoNotOptimize(res.residual.data());
    }
    state.SetItemsProcessed(state.iterations() * dm.num_equations());
}
BENCHMARK(BM_assemble_vvp_2d)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_assemble_vp_3d(benchmark::State& state) {
    const int mesh = static_cast<int>(state.range(0));
    const divcol::ManufacturedCase3D mc = divcol::filament_3d(1.0);
    const divcol::CaseDefinition3D c =
        divcol::make_vortex_case_3d(mc, divcol::Formulation::VP, 2, mesh);
    const divcol::DofMap dm = divcol::build_dof_map_3d(c);
    const divcol::DiscreteSolution3D s = divcol::zero_solution(c, dm);
    for (auto _ : state) {
        const divcol::AssemblyResult res = divcol::assemble_3d(c, dm, s, true);
        benchmark::DoNotOptimize(res.residual.data());
    }
    state.SetItemsProcessed(state.iterations() * dm.num_equations());
}
BENCHMARK(BM_assemble_vp_3d)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace
