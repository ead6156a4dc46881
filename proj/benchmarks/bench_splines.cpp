#include "divcol/spaces.hpp"
#include "divcol/splines.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

std::vector<double> breaks(int n) {
    std::vector<double> bp(n + 1);
    for (int i = 0; i <= n; ++i)
        bp[i] = static_cast<double>(i) / n;
    return bp;
}

void BM_eval_basis(benchmark::State& state) {
    const int degree = static_cast<int>(state.range(0));
    const divcol::KnotVector kv = divcol::make_open_knot_vector(degree, breaks(32));
    divcol::BasisEval be;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto _ : state) {
        divcol::eval_basis(kv, unit(rng), 2, be);
        benchmark::DoNotOptimize(be.values.data());
    }
}
BENCHMARK(BM_eval_basis)->Arg(2)->Arg(3)->Arg(5);

void BM_eval_field_2d(benchmark::State& state) {
    const divcol::ComplexSpaces2D s = divcol::build_complex_2d(2, breaks(32), breaks(32));
    std::vector<double> coeffs(s.psi.dim());
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& c : coeffs)
        c = unit(rng);
    for (auto _ : state) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const divcol::FieldSample f = divcol::eval_field(s.psi, coeffs, p, 2);
        benchmark::DoNotOptimize(f.value);
    }
}
BENCHMARK(BM_eval_field_2d);

} // namespace

BENCHMARK_MAIN();
