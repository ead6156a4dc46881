#include "divcol/splines.hpp"

#include "divcol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace divcol {

int KnotVector::find_span(double x) const {
    const int n = count();
    const double lo = domain_begin();
    const double hi = domain_end();
    if (x < lo || x > hi)
        throw OutOfDomain("evaluation point " + std::to_string(x) + " outside knot range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (x >= hi)
        return n - 1; // right endpoint: last nonempty span
    // binary search over knots[degree .. n], the nonempty-span boundaries
    int low = degree;
    int high = n;
    while (high - low > 1) {
        const int mid = (low + high) / 2;
        if (x < knots[mid])
            high = mid;
        else
            low = mid;
    }
    return low;
}

bool KnotVector::is_open() const {
    const int n = count();
    if (n < degree + 1)
        return false;
    for (int i = 0; i <= degree; ++i)
        if (knots[i] != knots[0] || knots[n + i] != knots[n + degree])
            return false;
    return knots[degree] != knots[degree + 1] && knots[n - 1] != knots[n];
}

KnotVector make_open_knot_vector(int degree, std::span<const double> breakpoints) {
    if (degree < 0)
        throw InvalidInput("negative degree");
    if (breakpoints.size() < 2)
        throw InvalidInput("need at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw InvalidInput("breakpoints must be strictly increasing");

    KnotVector kv;
    kv.degree = degree;
    kv.knots.reserve(breakpoints.size() + 2 * degree);
    for (int i = 0; i <= degree; ++i)
        kv.knots.push_back(breakpoints.front());
    for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i)
        kv.knots.push_back(breakpoints[i]);
    for (int i = 0; i <= degree; ++i)
        kv.knots.push_back(breakpoints.back());
    return kv;
}

std::vector<double> stretched_breakpoints(int num_elements) {
    if (num_elements < 2)
        throw InvalidInput("stretched_breakpoints needs num_elements >= 2");
    const double h = 1.0 / num_elements;
    const double t2 = std::tanh(2.0);
    std::vector<double> pts;
    pts.reserve(num_elements + 1);
    pts.push_back(0.0);
    for (int i = 1; i < num_elements; ++i)
        pts.push_back(0.5 * (1.0 + std::tanh(4.0 * i * h - 2.0) / t2));
    pts.push_back(1.0);
    return pts;
}

namespace {

// Cox-de Boor with derivatives (the classic triangular-table algorithm).
// Writes the degree+1 nonzero values on the containing span.
void ders_basis_funs(const KnotVector& kv, int span, double x, int nders, BasisEval& out) {
    const int p = kv.degree;
    const double* U = kv.knots.data();

    thread_local std::vector<double> work;
    const std::size_t stride = static_cast<std::size_t>(p + 1);
    work.assign(2 * stride + (stride * stride) + 2 * stride, 0.0);
    double* left = work.data();
    double* right = left + stride;
    double* ndu = right + stride;              // (p+1) x (p+1), row-major
    double* a = ndu + stride * stride;         // 2 x (p+1)

    auto NDU = [&](int i, int j) -> double& { return ndu[i * stride + j]; };

    NDU(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            NDU(j, r) = right[r + 1] + left[j - r];
            const double temp = NDU(j, r) != 0.0 ? NDU(r, j - 1) / NDU(j, r) : 0.0;
            NDU(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        NDU(j, j) = saved;
    }

    out.span = span;
    out.values.assign(stride, 0.0);
    out.first_derivs.assign(stride, 0.0);
    out.second_derivs.assign(stride, 0.0);
    for (int j = 0; j <= p; ++j)
        out.values[j] = NDU(j, p);
    if (nders == 0)
        return;

    auto A = [&](int i, int j) -> double& { return a[i * stride + j]; };
    const int nd = std::min(nders, p); // derivatives beyond the degree are zero
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        A(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                A(s2, 0) = NDU(pk + 1, rk) != 0.0 ? A(s1, 0) / NDU(pk + 1, rk) : 0.0;
                d = A(s2, 0) * NDU(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = r - 1 <= pk ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                A(s2, j) = NDU(pk + 1, rk + j) != 0.0 ? (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j) : 0.0;
                d += A(s2, j) * NDU(rk + j, pk);
            }
            if (r <= pk) {
                A(s2, k) = NDU(pk + 1, r) != 0.0 ? -A(s1, k - 1) / NDU(pk + 1, r) : 0.0;
                d += A(s2, k) * NDU(r, pk);
            }
            if (k == 1)
                out.first_derivs[r] = d;
            else if (k == 2)
                out.second_derivs[r] = d;
            std::swap(s1, s2);
        }
    }
    // scale by p!/(p-k)!
    double factor = p;
    if (nd >= 1)
        for (int j = 0; j <= p; ++j)
            out.first_derivs[j] *= factor;
    if (nd >= 2) {
        factor *= p - 1;
        for (int j = 0; j <= p; ++j)
            out.second_derivs[j] *= factor;
    }
}

} // namespace

void eval_basis(const KnotVector& kv, double x, int max_deriv, BasisEval& out) {
    if (max_deriv < 0 || max_deriv > 2)
        throw InvalidInput("eval_basis supports derivatives up to order 2");
    const int span = kv.find_span(x);
    ders_basis_funs(kv, span, x, max_deriv, out);
}

BasisEval eval_basis(const KnotVector& kv, double x, int max_deriv) {
    BasisEval out;
    eval_basis(kv, x, max_deriv, out);
    return out;
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
    if (kv.degree < 1)
        throw UnsupportedDegree("Greville abscissae need degree >= 1");
    const int n = kv.count();
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 1; j <= kv.degree; ++j)
            s += kv.knots[i + j];
        pts[i] = s / kv.degree;
    }
    return pts;
}

KnotVector derivative_knot_vector(const KnotVector& kv) {
    if (kv.degree < 1)
        throw InvalidInput("derivative space needs degree >= 1");
    if (!kv.is_open())
        throw InvalidInput("derivative_knot_vector expects an open knot vector");
    KnotVector d;
    d.degree = kv.degree - 1;
    d.knots.assign(kv.knots.begin() + 1, kv.knots.end() - 1);
    return d;
}

std::vector<double> derivative_coefficients(const KnotVector& kv, std::span<const double> coeffs) {
    const int n = kv.count();
    if (static_cast<int>(coeffs.size()) != n)
        throw InvalidInput("coefficient length mismatch");
    if (kv.degree < 1)
        throw InvalidInput("derivative of a degree-0 space");
    std::vector<double> d(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double dx = kv.knots[i + kv.degree + 1] - kv.knots[i + 1];
        d[i] = dx != 0.0 ? kv.degree * (coeffs[i + 1] - coeffs[i]) / dx : 0.0;
    }
    return d;
}

std::vector<double> basis_integrals(const KnotVector& kv) {
    const int n = kv.count();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = (kv.knots[i + kv.degree + 1] - kv.knots[i]) / (kv.degree + 1);
    return w;
}

} // namespace divcol
