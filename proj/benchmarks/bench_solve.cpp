#include "divcol/solver.hpp"
#include "divcol/verify.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_sparse_lu(benchmark::State& state) {
    const int mesh = static_cast<int>(state.range(0));
    const divcol::ManufacturedCase2D mc = divcol::vortex_2d(1.0, 1.0);
    const divcol::CaseDefinition2D c =
        divcol::make_vortex_case_2d(mc, divcol::Formulation::VVP, 2, mesh);
    const divcol::DofMap dm = divcol::build_dof_map(c);
    const divcol::DiscreteSolution2D s = divcol::zero_solution(c, dm);
    const divcol::AssemblyResult res = divcol::assemble_2d(c, dm, s, true);
    const Eigen::VectorXd rhs = -res.residual;
    for (auto _ : state) {
        const Eigen::VectorXd x = divcol::solve_linear(res.jacobian, rhs);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_sparse_lu)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_vortex_newton_solve(benchmark::State& state) {
    const int mesh = static_cast<int>(state.range(0));
    const divcol::ManufacturedCase2D mc = divcol::vortex_2d(1.0, 1.0);
    const divcol::CaseDefinition2D c =
        divcol::make_vortex_case_2d(mc, divcol::Formulation::VVP, 2, mesh);
    for (auto _ : state) {
        const divcol::SolveOutcome2D out = divcol::solve_case_2d(c);
        benchmark::DoNotOptimize(out.report.iterations);
    }
}
BENCHMARK(BM_vortex_newton_solve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

} // namespace
