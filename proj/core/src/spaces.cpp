#include "divcol/spaces.hpp"

#include "divcol/errors.hpp"

#include <Eigen/Dense>

#include <string>

namespace divcol {

ComplexSpaces2D build_complex_2d(int kprime, std::span<const double> breakpoints_x,
                                 std::span<const double> breakpoints_y) {
    if (kprime < 1)
        throw UnsupportedDegree("build_complex_2d needs k' >= 1");
    const KnotVector full_x = make_open_knot_vector(kprime + 1, breakpoints_x);
    const KnotVector full_y = make_open_knot_vector(kprime + 1, breakpoints_y);
    const KnotVector red_x = derivative_knot_vector(full_x);
    const KnotVector red_y = derivative_knot_vector(full_y);

    ComplexSpaces2D s;
    s.kprime = kprime;
    s.psi.kv = {full_x, full_y};
    s.vel_x.kv = {full_x, red_y};
    s.vel_y.kv = {red_x, full_y};
    s.pres.kv = {red_x, red_y};
    return s;
}

ComplexSpaces3D build_complex_3d(int kprime, std::span<const double> breakpoints_x,
                                 std::span<const double> breakpoints_y,
                                 std::span<const double> breakpoints_z) {
    if (kprime < 1)
        throw UnsupportedDegree("build_complex_3d needs k' >= 1");
    const KnotVector full[3] = {make_open_knot_vector(kprime + 1, breakpoints_x),
                                make_open_knot_vector(kprime + 1, breakpoints_y),
                                make_open_knot_vector(kprime + 1, breakpoints_z)};
    const KnotVector red[3] = {derivative_knot_vector(full[0]), derivative_knot_vector(full[1]),
                               derivative_knot_vector(full[2])};

    ComplexSpaces3D s;
    s.kprime = kprime;
    s.phi.kv = {full[0], full[1], full[2]};
    for (int c = 0; c < 3; ++c) {
        s.omega[c].kv = {full[0], full[1], full[2]};
        s.omega[c].kv[c] = red[c]; // reduced along its own direction
        s.vel[c].kv = {red[0], red[1], red[2]};
        s.vel[c].kv[c] = full[c]; // full along its own direction
    }
    s.pres.kv = {red[0], red[1], red[2]};
    return s;
}

FieldSample eval_field(const TensorSpace& space, std::span<const double> coeffs,
                       std::span<const double> point, int max_deriv) {
    const int dim = space.dims();
    if (static_cast<long>(coeffs.size()) != space.dim())
        throw InvalidInput("eval_field: coefficient length " + std::to_string(coeffs.size()) +
                           " does not match space dim " + std::to_string(space.dim()));
    if (static_cast<int>(point.size()) < dim)
        throw InvalidInput("eval_field: point dimension mismatch");

    thread_local std::array<BasisEval, 3> be;
    for (int d = 0; d < dim; ++d)
        eval_basis(space.kv[d], point[d], max_deriv, be[d]);

    FieldSample out;
    const int n0 = space.count(0);
    if (dim == 2) {
        const int n1 = space.count(1);
        (void)n1;
        const int o0 = be[0].first_basis(space.kv[0].degree);
        const int o1 = be[1].first_basis(space.kv[1].degree);
        for (int j1 = 0; j1 <= space.kv[1].degree; ++j1) {
            double v = 0.0, dx = 0.0, dxx = 0.0;
            for (int j0 = 0; j0 <= space.kv[0].degree; ++j0) {
                const double c = coeffs[(o0 + j0) + static_cast<long>(n0) * (o1 + j1)];
                v += c * be[0].values[j0];
                if (max_deriv >= 1)
                    dx += c * be[0].first_derivs[j0];
                if (max_deriv >= 2)
                    dxx += c * be[0].second_derivs[j0];
            }
            out.value += v * be[1].values[j1];
            if (max_deriv >= 1) {
                out.gradient[0] += dx * be[1].values[j1];
                out.gradient[1] += v * be[1].first_derivs[j1];
            }
            if (max_deriv >= 2) {
                out.second[0] += dxx * be[1].values[j1];        // xx
                out.second[1] += v * be[1].second_derivs[j1];   // yy
                out.second[3] += dx * be[1].first_derivs[j1];   // xy
            }
        }
    } else {
        const int n1 = space.count(1);
        const int o0 = be[0].first_basis(space.kv[0].degree);
        const int o1 = be[1].first_basis(space.kv[1].degree);
        const int o2 = be[2].first_basis(space.kv[2].degree);
        for (int j2 = 0; j2 <= space.kv[2].degree; ++j2) {
            double v2 = 0.0, dx2 = 0.0, dy2 = 0.0, dxx2 = 0.0, dyy2 = 0.0, dxy2 = 0.0;
            for (int j1 = 0; j1 <= space.kv[1].degree; ++j1) {
                double v = 0.0, dx = 0.0, dxx = 0.0;
                for (int j0 = 0; j0 <= space.kv[0].degree; ++j0) {
                    const long idx = (o0 + j0) + static_cast<long>(n0) * ((o1 + j1) + static_cast<long>(n1) * (o2 + j2));
                    const double c = coeffs[idx];
                    v += c * be[0].values[j0];
                    if (max_deriv >= 1)
                        dx += c * be[0].first_derivs[j0];
                    if (max_deriv >= 2)
                        dxx += c * be[0].second_derivs[j0];
                }
                v2 += v * be[1].values[j1];
                if (max_deriv >= 1) {
                    dx2 += dx * be[1].values[j1];
                    dy2 += v * be[1].first_derivs[j1];
                }
                if (max_deriv >= 2) {
                    dxx2 += dxx * be[1].values[j1];
                    dyy2 += v * be[1].second_derivs[j1];
                    dxy2 += dx * be[1].first_derivs[j1];
                }
            }
            out.value += v2 * be[2].values[j2];
            if (max_deriv >= 1) {
                out.gradient[0] += dx2 * be[2].values[j2];
                out.gradient[1] += dy2 * be[2].values[j2];
                out.gradient[2] += v2 * be[2].first_derivs[j2];
            }
            if (max_deriv >= 2) {
                out.second[0] += dxx2 * be[2].values[j2]; // xx
                out.second[1] += dyy2 * be[2].values[j2]; // yy
                out.second[2] += v2 * be[2].second_derivs[j2]; // zz
                out.second[3] += dxy2 * be[2].values[j2]; // xy
                out.second[4] += dx2 * be[2].first_derivs[j2]; // xz
                out.second[5] += dy2 * be[2].first_derivs[j2]; // yz
            }
        }
    }
    return out;
}

std::vector<GrevillePoint> greville_grid(const TensorSpace& space) {
    const int dim = space.dims();
    std::array<std::vector<double>, 3> pts;
    for (int d = 0; d < dim; ++d)
        pts[d] = greville_abscissae(space.kv[d]);

    std::vector<GrevillePoint> grid(space.dim());
    std::array<int, 3> midx{0, 0, 0};
    for (long f = 0; f < space.dim(); ++f) {
        GrevillePoint& g = grid[f];
        g.idx = midx;
        for (int d = 0; d < dim; ++d) {
            g.x[d] = pts[d][midx[d]];
            if (midx[d] == 0)
                g.faces |= (1u << (2 * d));
            if (midx[d] == space.count(d) - 1)
                g.faces |= (1u << (2 * d + 1));
        }
        for (int d = 0; d < dim; ++d) {
            if (++midx[d] < space.count(d))
                break;
            midx[d] = 0;
        }
    }
    return grid;
}

std::vector<double> derivative_coeffs(const TensorSpace& space, std::span<const double> coeffs,
                                      int dir) {
    if (static_cast<long>(coeffs.size()) != space.dim())
        throw InvalidInput("derivative_coeffs: coefficient length mismatch");
    const int dim = space.dims();
    const KnotVector& kv = space.kv[dir];
    const int nd = kv.count();

    std::array<long, 3> n{1, 1, 1};
    for (int d = 0; d < dim; ++d)
        n[d] = space.count(d);

    std::array<long, 3> m = n;
    m[dir] = nd - 1;
    std::vector<double> out(m[0] * m[1] * m[2]);

    auto in_idx = [&](long i, long j, long k) { return i + n[0] * (j + n[1] * k); };
    auto out_idx = [&](long i, long j, long k) { return i + m[0] * (j + m[1] * k); };

    for (long k = 0; k < m[2]; ++k)
        for (long j = 0; j < m[1]; ++j)
            for (long i = 0; i < m[0]; ++i) {
                std::array<long, 3> a{i, j, k};
                const long t = a[dir];
                const double dx = kv.knots[t + kv.degree + 1] - kv.knots[t + 1];
                std::array<long, 3> hi = a;
                hi[dir] = t + 1;
                const double diff = coeffs[in_idx(hi[0], hi[1], hi[2])] - coeffs[in_idx(a[0], a[1], a[2])];
                out[out_idx(i, j, k)] = dx != 0.0 ? kv.degree * diff / dx : 0.0;
            }
    return out;
}

std::vector<double> divergence_coeffs_2d(const ComplexSpaces2D& spaces,
                                         std::span<const double> ux_coeffs,
                                         std::span<const double> uy_coeffs) {
    std::vector<double> c = derivative_coeffs(spaces.vel_x, ux_coeffs, 0);
    const std::vector<double> cy = derivative_coeffs(spaces.vel_y, uy_coeffs, 1);
    if (c.size() != cy.size())
        throw InvalidInput("divergence_coeffs_2d: inconsistent spaces");
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += cy[i];
    return c;
}

std::pair<std::vector<double>, std::vector<double>>
rotor_coeffs_2d(const ComplexSpaces2D& spaces, std::span<const double> psi_coeffs) {
    std::vector<double> ux = derivative_coeffs(spaces.psi, psi_coeffs, 1);
    std::vector<double> uy = derivative_coeffs(spaces.psi, psi_coeffs, 0);
    for (double& v : uy)
        v = -v;
    return {std::move(ux), std::move(uy)};
}

std::array<std::vector<double>, 3> gradient_coeffs_3d(const ComplexSpaces3D& spaces,
                                                      std::span<const double> phi_coeffs) {
    return {derivative_coeffs(spaces.phi, phi_coeffs, 0),
            derivative_coeffs(spaces.phi, phi_coeffs, 1),
            derivative_coeffs(spaces.phi, phi_coeffs, 2)};
}

std::array<std::vector<double>, 3> curl_coeffs_3d(const ComplexSpaces3D& spaces,
                                                  std::span<const double> wx,
                                                  std::span<const double> wy,
                                                  std::span<const double> wz) {
    auto sub = [](std::vector<double> a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            a[i] -= b[i];
        return a;
    };
    return {sub(derivative_coeffs(spaces.omega[2], wz, 1), derivative_coeffs(spaces.omega[1], wy, 2)),
            sub(derivative_coeffs(spaces.omega[0], wx, 2), derivative_coeffs(spaces.omega[2], wz, 0)),
            sub(derivative_coeffs(spaces.omega[1], wy, 0), derivative_coeffs(spaces.omega[0], wx, 1))};
}

std::vector<double> divergence_coeffs_3d(const ComplexSpaces3D& spaces,
                                         std::span<const double> ux,
                                         std::span<const double> uy,
                                         std::span<const double> uz) {
    std::vector<double> c = derivative_coeffs(spaces.vel[0], ux, 0);
    const std::vector<double> cy = derivative_coeffs(spaces.vel[1], uy, 1);
    const std::vector<double> cz = derivative_coeffs(spaces.vel[2], uz, 2);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += cy[i] + cz[i];
    return c;
}

std::vector<double> greville_interpolate(const TensorSpace& space,
                                         const std::vector<GrevillePoint>& grid,
                                         std::span<const double> values) {
    const int dim = space.dims();
    if (static_cast<long>(values.size()) != space.dim() ||
        static_cast<long>(grid.size()) != space.dim())
        throw InvalidInput("greville_interpolate: size mismatch");

    std::vector<double> work(values.begin(), values.end());
    std::array<long, 3> n{1, 1, 1};
    for (int d = 0; d < dim; ++d)
        n[d] = space.count(d);

    for (int d = 0; d < dim; ++d) {
        const KnotVector& kv = space.kv[d];
        const std::vector<double> pts = greville_abscissae(kv);
        const int nd = kv.count();
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nd, nd);
        BasisEval be;
        for (int a = 0; a < nd; ++a) {
            eval_basis(kv, pts[a], 0, be);
            const int off = be.first_basis(kv.degree);
            for (int j = 0; j <= kv.degree; ++j)
                B(a, off + j) = be.values[j];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible())
            throw AssemblyError("singular Greville interpolation matrix");

        // solve along direction d for every line
        const long stride_before = d == 0 ? 1 : (d == 1 ? n[0] : n[0] * n[1]);
        Eigen::VectorXd rhs(nd);
        std::array<long, 3> m = n;
        m[d] = 1;
        for (long k = 0; k < m[2]; ++k)
            for (long j = 0; j < m[1]; ++j)
                for (long i = 0; i < m[0]; ++i) {
                    const long base = i + n[0] * (j + n[1] * k);
                    for (long t = 0; t < nd; ++t)
                        rhs[t] = work[base + t * stride_before];
                    Eigen::VectorXd sol = lu.solve(rhs);
                    for (long t = 0; t < nd; ++t)
                        work[base + t * stride_before] = sol[t];
                }
    }
    return work;
}

} // namespace divcol
