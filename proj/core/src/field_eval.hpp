#pragma once

// Internal: active tensor-basis evaluation shared by the assembly routines.

#include "divcol/spaces.hpp"

#include <span>

namespace divcol::detail {

struct Vals2D {
    double v = 0, dx = 0, dy = 0, dxx = 0, dyy = 0, dxy = 0;
};

struct Active2D {
    const TensorSpace* sp = nullptr;
    BasisEval b0, b1;
    int o0 = 0, o1 = 0;

    void init(const TensorSpace& s, double x, double y, int max_deriv) {
        sp = &s;
        eval_basis(s.kv[0], x, max_deriv, b0);
        eval_basis(s.kv[1], y, max_deriv, b1);
        o0 = b0.first_basis(s.kv[0].degree);
        o1 = b1.first_basis(s.kv[1].degree);
    }

    Vals2D field(std::span<const double> coeffs) const {
        Vals2D r;
        const int n0 = sp->count(0);
        for (int j1 = 0; j1 <= sp->kv[1].degree; ++j1)
            for (int j0 = 0; j0 <= sp->kv[0].degree; ++j0) {
                const double c = coeffs[(o0 + j0) + static_cast<long>(n0) * (o1 + j1)];
                r.v += c * b0.values[j0] * b1.values[j1];
                r.dx += c * b0.first_derivs[j0] * b1.values[j1];
                r.dy += c * b0.values[j0] * b1.first_derivs[j1];
                r.dxx += c * b0.second_derivs[j0] * b1.values[j1];
                r.dyy += c * b0.values[j0] * b1.second_derivs[j1];
                r.dxy += c * b0.first_derivs[j0] * b1.first_derivs[j1];
            }
        return r;
    }

    // f(flat_coeff_index, N, Nx, Ny, Nxx, Nyy, Nxy)
    template <class F>
    void for_active(F&& f) const {
        const int n0 = sp->count(0);
        for (int j1 = 0; j1 <= sp->kv[1].degree; ++j1)
            for (int j0 = 0; j0 <= sp->kv[0].degree; ++j0) {
                const long idx = (o0 + j0) + static_cast<long>(n0) * (o1 + j1);
                f(idx, b0.values[j0] * b1.values[j1], b0.first_derivs[j0] * b1.values[j1],
                  b0.values[j0] * b1.first_derivs[j1], b0.second_derivs[j0] * b1.values[j1],
                  b0.values[j0] * b1.second_derivs[j1], b0.first_derivs[j0] * b1.first_derivs[j1]);
            }
    }
};

struct Vals3D {
    double v = 0, dx = 0, dy = 0, dz = 0, dxx = 0, dyy = 0, dzz = 0;
};

struct Active3D {
    const TensorSpace* sp = nullptr;
    BasisEval b0, b1, b2;
    int o0 = 0, o1 = 0, o2 = 0;

    void init(const TensorSpace& s, double x, double y, double z, int max_deriv) {
        sp = &s;
        eval_basis(s.kv[0], x, max_deriv, b0);
        eval_basis(s.kv[1], y, max_deriv, b1);
        eval_basis(s.kv[2], z, max_deriv, b2);
        o0 = b0.first_basis(s.kv[0].degree);
        o1 = b1.first_basis(s.kv[1].degree);
        o2 = b2.first_basis(s.kv[2].degree);
    }

    Vals3D field(std::span<const double> coeffs) const {
        Vals3D r;
        const long n0 = sp->count(0);
        const long n1 = sp->count(1);
        for (int j2 = 0; j2 <= sp->kv[2].degree; ++j2)
            for (int j1 = 0; j1 <= sp->kv[1].degree; ++j1)
                for (int j0 = 0; j0 <= sp->kv[0].degree; ++j0) {
                    const double c = coeffs[(o0 + j0) + n0 * ((o1 + j1) + n1 * (o2 + j2))];
                    const double w0 = b0.values[j0], w1 = b1.values[j1], w2 = b2.values[j2];
                    r.v += c * w0 * w1 * w2;
                    r.dx += c * b0.first_derivs[j0] * w1 * w2;
                    r.dy += c * w0 * b1.first_derivs[j1] * w2;
                    r.dz += c * w0 * w1 * b2.first_derivs[j2];
                    r.dxx += c * b0.second_derivs[j0] * w1 * w2;
                    r.dyy += c * w0 * b1.second_derivs[j1] * w2;
                    r.dzz += c * w0 * w1 * b2.second_derivs[j2];
                }
        return r;
    }

    // f(flat_coeff_index, N, Nx, Ny, Nz, Nxx, Nyy, Nzz)
    template <class F>
    void for_active(F&& f) const {
        const long n0 = sp->count(0);
        const long n1 = sp->count(1);
        for (int j2 = 0; j2 <= sp->kv[2].degree; ++j2)
            for (int j1 = 0; j1 <= sp->kv[1].degree; ++j1)
                for (int j0 = 0; j0 <= sp->kv[0].degree; ++j0) {
                    const long idx = (o0 + j0) + n0 * ((o1 + j1) + n1 * (o2 + j2));
                    const double w0 = b0.values[j0], w1 = b1.values[j1], w2 = b2.values[j2];
                    f(idx, w0 * w1 * w2, b0.first_derivs[j0] * w1 * w2,
                      w0 * b1.first_derivs[j1] * w2, w0 * w1 * b2.first_derivs[j2],
                      b0.second_derivs[j0] * w1 * w2, w0 * b1.second_derivs[j1] * w2,
                      w0 * w1 * b2.second_derivs[j2]);
                }
    }
};

// Greville spacing next to each wall of a knot vector: {first gap, last gap}.
inline std::pair<double, double> wall_greville_gaps(const KnotVector& kv) {
    const std::vector<double> g = greville_abscissae(kv);
    return {g[1] - g[0], g[g.size() - 1] - g[g.size() - 2]};
}

} // namespace divcol::detail
