#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace divcol {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on Legendre polynomials).
const GaussRule& gauss_legendre(int n);

/// Nodes/weights of the n-point rule mapped to [a, b].
void gauss_on_interval(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights);

/// Halton low-discrepancy sequence in [0,1]^dim (bases 2, 3, 5), index starts at 1.
std::array<double, 3> halton_point(std::uint64_t index, int dim);

} // namespace divcol
