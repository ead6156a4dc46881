#include "divcol/quadrature.hpp"

#include "divcol/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace divcol {

namespace {

GaussRule compute_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n / 2 + n % 2; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1)
        throw InvalidInput("Gauss rule needs at least one point");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

void gauss_on_interval(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights) {
    const GaussRule& rule = gauss_legendre(n);
    nodes.resize(n);
    weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        nodes[i] = mid + half * rule.nodes[i];
        weights[i] = half * rule.weights[i];
    }
}

std::array<double, 3> halton_point(std::uint64_t index, int dim) {
    static constexpr int bases[3] = {2, 3, 5};
    std::array<double, 3> p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
        double f = 1.0, r = 0.0;
        std::uint64_t i = index;
        while (i > 0) {
            f /= bases[d];
            r += f * static_cast<double>(i % bases[d]);
            i /= bases[d];
        }
        p[d] = r;
    }
    return p;
}

} // namespace divcol
