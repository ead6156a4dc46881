#include "divcol/verify.hpp"

#include "divcol/errors.hpp"
#include "divcol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace divcol {

namespace {

// value and first three derivatives of a 1D factor
struct F1 {
    double v = 0, d1 = 0, d2 = 0, d3 = 0;
};

// q(t) = t^2 (t-1)^2 = t^4 - 2 t^3 + t^2
F1 quartic_bubble(double t) {
    F1 f;
    f.v = t * t * (t - 1) * (t - 1);
    f.d1 = 4 * t * t * t - 6 * t * t + 2 * t;
    f.d2 = 12 * t * t - 12 * t + 2;
    f.d3 = 24 * t - 12;
    return f;
}

// a(t) = t^2 - t
F1 quadratic_bubble(double t) {
    F1 f;
    f.v = t * t - t;
    f.d1 = 2 * t - 1;
    f.d2 = 2;
    f.d3 = 0;
    return f;
}

// X(t) = e^t q(t)
F1 exp_bubble(double t) {
    const F1 q = quartic_bubble(t);
    const double e = std::exp(t);
    F1 f;
    f.v = e * q.v;
    f.d1 = e * (q.v + q.d1);
    f.d2 = e * (q.v + 2 * q.d1 + q.d2);
    f.d3 = e * (q.v + 3 * q.d1 + 3 * q.d2 + q.d3);
    return f;
}

// the paper's printed vortex pressure and its gradient
double vortex_pressure(double x, double y) {
    const double w = y * y - y;
    const double ex = std::exp(x);
    const double G = 456 + x * x * (228 - 5 * w) + 2 * x * (-228 + w) +
                     2 * x * x * x * (-36 + w) + x * x * x * x * (12 + w);
    return -424 + 156 * std::exp(1.0) + w * (-456 + ex * G);
}

std::array<double, 2> vortex_pressure_grad(double x, double y) {
    const double w = y * y - y;
    const double wp = 2 * y - 1;
    const double ex = std::exp(x);
    const double G = 456 + x * x * (228 - 5 * w) + 2 * x * (-228 + w) +
                     2 * x * x * x * (-36 + w) + x * x * x * x * (12 + w);
    const double Gx = 2 * x * (228 - 5 * w) + 2 * (-228 + w) + 6 * x * x * (-36 + w) +
                      4 * x * x * x * (12 + w);
    const double Gw = -5 * x * x + 2 * x + 2 * x * x * x + x * x * x * x;
    return {w * ex * (G + Gx), wp * (-456 + ex * G) + w * ex * Gw * wp};
}

} // namespace

ManufacturedCase2D vortex_2d(double nu, double sigma) {
    if (nu <= 0.0)
        throw InvalidInput("vortex_2d needs nu > 0");
    ManufacturedCase2D mc;
    mc.nu = nu;
    mc.sigma = sigma;

    // stream function psi = X(x) Y(y): u = (X Y', -X' Y), omega = -(X'' Y + X Y'')
    auto u_of = [](double x, double y) {
        const F1 X = exp_bubble(x);
        const F1 Y = quartic_bubble(y);
        return std::array<double, 2>{X.v * Y.d1, -X.d1 * Y.v};
    };
    auto du_of = [](double x, double y) {
        const F1 X = exp_bubble(x);
        const F1 Y = quartic_bubble(y);
        return std::array<double, 4>{X.d1 * Y.d1, X.v * Y.d2, -X.d2 * Y.v, -X.d1 * Y.d1};
    };
    auto w_of = [](double x, double y) {
        const F1 X = exp_bubble(x);
        const F1 Y = quartic_bubble(y);
        return -(X.d2 * Y.v + X.v * Y.d2);
    };
    auto dw_of = [](double x, double y) {
        const F1 X = exp_bubble(x);
        const F1 Y = quartic_bubble(y);
        return std::array<double, 2>{-(X.d3 * Y.v + X.d1 * Y.d2), -(X.d2 * Y.d1 + X.v * Y.d3)};
    };

    mc.exact.velocity = u_of;
    mc.exact.velocity_grad = du_of;
    mc.exact.pressure = [sigma](double x, double y) { return sigma * vortex_pressure(x, y); };
    mc.exact.pressure_grad = [sigma](double x, double y) {
        auto g = vortex_pressure_grad(x, y);
        return std::array<double, 2>{sigma * g[0], sigma * g[1]};
    };
    mc.exact.vorticity = w_of;
    mc.exact.vorticity_grad = dw_of;

    mc.forcing_vp = [nu, sigma, u_of, du_of](double x, double y) {
        const F1 X = exp_bubble(x);
        const F1 Y = quartic_bubble(y);
        const std::array<double, 2> lap{X.d2 * Y.d1 + X.v * Y.d3, -(X.d3 * Y.v + X.d1 * Y.d2)};
        const auto u = u_of(x, y);
        const auto du = du_of(x, y);
        const auto dp = vortex_pressure_grad(x, y);
        return std::array<double, 2>{
            -nu * lap[0] + u[0] * du[0] + u[1] * du[1] + sigma * dp[0],
            -nu * lap[1] + u[0] * du[2] + u[1] * du[3] + sigma * dp[1]};
    };
    mc.forcing_vvp = [nu, sigma, u_of, du_of, w_of, dw_of](double x, double y) {
        const auto u = u_of(x, y);
        const auto du = du_of(x, y);
        const double w = w_of(x, y);
        const auto dw = dw_of(x, y);
        const auto dp = vortex_pressure_grad(x, y);
        // grad P = sigma grad p + (grad u)^T u
        const double dPx = sigma * dp[0] + u[0] * du[0] + u[1] * du[2];
        const double dPy = sigma * dp[1] + u[0] * du[1] + u[1] * du[3];
        return std::array<double, 2>{nu * dw[1] - w * u[1] + dPx, -nu * dw[0] + w * u[0] + dPy};
    };
    return mc;
}

ManufacturedCase3D filament_3d(double nu) {
    if (nu <= 0.0)
        throw InvalidInput("filament_3d needs nu > 0");
    ManufacturedCase3D mc;
    mc.nu = nu;

    // potential phi = (a(x) b(y) c(z), 0, B(x) b(y) e(z)), u = curl phi:
    //   u_x = B b' e, u_y = a b c' - B' b e, u_z = -a b' c
    struct Fields {
        std::array<double, 3> u;
        std::array<double, 9> du;  // du_i/dx_j
        std::array<double, 3> lap; // laplacian of u
        std::array<double, 3> w;
        std::array<double, 9> dw;
    };
    auto fields = [](double x, double y, double z) {
        const F1 a = quadratic_bubble(x);
        const F1 B = quartic_bubble(x);
        const F1 b = quartic_bubble(y);
        const F1 cz = quartic_bubble(z);
        const F1 e = quadratic_bubble(z);
        Fields f;
        f.u = {B.v * b.d1 * e.v, a.v * b.v * cz.d1 - B.d1 * b.v * e.v, -a.v * b.d1 * cz.v};
        f.du = {
            B.d1 * b.d1 * e.v,  B.v * b.d2 * e.v,  B.v * b.d1 * e.d1,
            a.d1 * b.v * cz.d1 - B.d2 * b.v * e.v,
            a.v * b.d1 * cz.d1 - B.d1 * b.d1 * e.v,
            a.v * b.v * cz.d2 - B.d1 * b.v * e.d1,
            -a.d1 * b.d1 * cz.v, -a.v * b.d2 * cz.v, -a.v * b.d1 * cz.d1,
        };
        f.lap = {
            B.d2 * b.d1 * e.v + B.v * b.d3 * e.v + B.v * b.d1 * e.d2,
            (a.d2 * b.v * cz.d1 - B.d3 * b.v * e.v) + (a.v * b.d2 * cz.d1 - B.d1 * b.d2 * e.v) +
                (a.v * b.v * cz.d3 - B.d1 * b.v * e.d2),
            -(a.d2 * b.d1 * cz.v) - (a.v * b.d3 * cz.v) - (a.v * b.d1 * cz.d2),
        };
        // w = curl u
        f.w = {
            -a.v * b.d2 * cz.v - a.v * b.v * cz.d2 + B.d1 * b.v * e.d1,
            B.v * b.d1 * e.d1 + a.d1 * b.d1 * cz.v,
            a.d1 * b.v * cz.d1 - B.d2 * b.v * e.v - B.v * b.d2 * e.v,
        };
        f.dw = {
            // dw_x / dx, dy, dz
            -a.d1 * b.d2 * cz.v - a.d1 * b.v * cz.d2 + B.d2 * b.v * e.d1,
            -a.v * b.d3 * cz.v - a.v * b.d1 * cz.d2 + B.d1 * b.d1 * e.d1,
            -a.v * b.d2 * cz.d1 - a.v * b.v * cz.d3 + B.d1 * b.v * e.d2,
            // dw_y
            B.d1 * b.d1 * e.d1 + a.d2 * b.d1 * cz.v,
            B.v * b.d2 * e.d1 + a.d1 * b.d2 * cz.v,
            B.v * b.d1 * e.d2 + a.d1 * b.d1 * cz.d1,
            // dw_z
            a.d2 * b.v * cz.d1 - B.d3 * b.v * e.v - B.d1 * b.d2 * e.v,
            a.d1 * b.d1 * cz.d1 - B.d2 * b.d1 * e.v - B.v * b.d3 * e.v,
            a.d1 * b.v * cz.d2 - B.d2 * b.v * e.d1 - B.v * b.d2 * e.d1,
        };
        return f;
    };

    auto p_of = [](double x, double y, double) {
        return std::sin(M_PI * x) * std::sin(M_PI * y) - 4.0 / (M_PI * M_PI);
    };
    auto dp_of = [](double x, double y, double) {
        return std::array<double, 3>{M_PI * std::cos(M_PI * x) * std::sin(M_PI * y),
                                     M_PI * std::sin(M_PI * x) * std::cos(M_PI * y), 0.0};
    };

    mc.exact.velocity = [fields](double x, double y, double z) { return fields(x, y, z).u; };
    mc.exact.velocity_grad = [fields](double x, double y, double z) { return fields(x, y, z).du; };
    mc.exact.pressure = p_of;
    mc.exact.pressure_grad = dp_of;
    mc.exact.vorticity = [fields](double x, double y, double z) { return fields(x, y, z).w; };
    mc.exact.vorticity_grad = [fields](double x, double y, double z) { return fields(x, y, z).dw; };

    mc.forcing_vp = [nu, fields, dp_of](double x, double y, double z) {
        const Fields f = fields(x, y, z);
        const auto dp = dp_of(x, y, z);
        std::array<double, 3> out;
        for (int i = 0; i < 3; ++i) {
            double conv = 0.0;
            for (int j = 0; j < 3; ++j)
                conv += f.u[j] * f.du[3 * i + j];
            out[i] = -nu * f.lap[i] + conv + dp[i];
        }
        return out;
    };
    mc.forcing_vvp = [nu, fields, dp_of](double x, double y, double z) {
        const Fields f = fields(x, y, z);
        const auto dp = dp_of(x, y, z);
        const std::array<double, 3> wxu{f.w[1] * f.u[2] - f.w[2] * f.u[1],
                                        f.w[2] * f.u[0] - f.w[0] * f.u[2],
                                        f.w[0] * f.u[1] - f.w[1] * f.u[0]};
        std::array<double, 3> out;
        for (int i = 0; i < 3; ++i) {
            double dkin = 0.0; // d(|u|^2/2)/dx_i = sum_j u_j du_j/dx_i
            for (int j = 0; j < 3; ++j)
                dkin += f.u[j] * f.du[3 * j + i];
            out[i] = -nu * f.lap[i] + wxu[i] + dp[i] + dkin;
        }
        return out;
    };
    return mc;
}

namespace {

std::vector<double> span_breaks(const KnotVector& kv) {
    std::vector<double> b;
    for (int i = kv.degree; i <= kv.count(); ++i)
        if (b.empty() || kv.knots[i] > b.back())
            b.push_back(kv.knots[i]);
    return b;
}

struct QuadGrid {
    std::vector<double> nodes, weights;
};

QuadGrid quad_1d(const KnotVector& kv, int per_span) {
    QuadGrid q;
    const std::vector<double> b = span_breaks(kv);
    std::vector<double> n, w;
    for (std::size_t s = 0; s + 1 < b.size(); ++s) {
        gauss_on_interval(per_span, b[s], b[s + 1], n, w);
        q.nodes.insert(q.nodes.end(), n.begin(), n.end());
        q.weights.insert(q.weights.end(), w.begin(), w.end());
    }
    return q;
}

struct Accum {
    double sq = 0.0;   // integral of delta^2
    double lin = 0.0;  // integral of delta (for mean alignment)
    void add(double delta, double w) {
        sq += w * delta * delta;
        lin += w * delta;
    }
    double l2_aligned(double area) const { return std::sqrt(std::max(0.0, sq - lin * lin / area)); }
    double l2_plain() const { return std::sqrt(sq); }
};

} // namespace

ErrorReport error_norms_2d(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol,
                           Formulation formulation, bool pressure_is_total, const Exact2D& exact,
                           const GeometryMap2D* map, int quad_per_span) {
    if (quad_per_span <= 0)
        quad_per_span = spaces.kprime + 3;
    if (quad_per_span < 1)
        throw InvalidInput("error_norms: quadrature order must be >= 1");
    if (pressure_is_total && map != nullptr)
        throw InvalidInput("error_norms: total-pressure recovery is a square-domain feature");

    const bool has_w = formulation == Formulation::VVP && !sol.w.empty();
    const QuadGrid qx = quad_1d(spaces.psi.kv[0], quad_per_span);
    const QuadGrid qy = quad_1d(spaces.psi.kv[1], quad_per_span);

    double area = 0.0;
    double vel_sq = 0.0, vel_h1 = 0.0, vort_h1 = 0.0, pres_h1 = 0.0;
    Accum pres, vort;

    for (std::size_t j = 0; j < qy.nodes.size(); ++j)
        for (std::size_t i = 0; i < qx.nodes.size(); ++i) {
            const std::array<double, 2> xi{qx.nodes[i], qy.nodes[j]};
            const double wq = qx.weights[i] * qy.weights[j];

            const FieldSample fx = eval_field(spaces.vel_x, sol.ux, xi, 1);
            const FieldSample fy = eval_field(spaces.vel_y, sol.uy, xi, 1);
            const FieldSample fp = eval_field(spaces.pres, sol.p, xi, 1);
            FieldSample fw;
            if (has_w)
                fw = eval_field(spaces.psi, sol.w, xi, 1);

            double px = xi[0], py = xi[1], weight = wq;
            double uh[2] = {fx.value, fy.value};
            double duh[4] = {fx.gradient[0], fx.gradient[1], fy.gradient[0], fy.gradient[1]};
            double ph = fp.value;
            double dph[2] = {fp.gradient[0], fp.gradient[1]};
            double wh = fw.value;
            double dwh[2] = {fw.gradient[0], fw.gradient[1]};

            if (map) {
                const MapJet m = map->jet(xi[0], xi[1]);
                const double J = m.jac();
                px = m.x;
                py = m.y;
                weight = wq * std::abs(J);
                const auto dJ = m.djac();

                // u = DF uhat / J; parametric derivatives then chain by DF^{-1}
                const double uhat[2] = {fx.value, fy.value};
                const double duhat[2][2] = {{fx.gradient[0], fx.gradient[1]},
                                            {fy.gradient[0], fy.gradient[1]}};
                const double DF[2][2] = {{m.x1, m.x2}, {m.y1, m.y2}};
                const double dDF[2][2][2] = {{{m.x11, m.x12}, {m.x12, m.x22}},
                                             {{m.y11, m.y12}, {m.y12, m.y22}}};
                double u[2], du_dxi[2][2];
                for (int r = 0; r < 2; ++r) {
                    u[r] = (DF[r][0] * uhat[0] + DF[r][1] * uhat[1]) / J;
                    for (int d = 0; d < 2; ++d) {
                        const double t = dDF[r][0][d] * uhat[0] + dDF[r][1][d] * uhat[1] +
                                         DF[r][0] * duhat[0][d] + DF[r][1] * duhat[1][d];
                        du_dxi[r][d] = t / J - dJ[d] / (J * J) *
                                                   (DF[r][0] * uhat[0] + DF[r][1] * uhat[1]);
                    }
                }
                const double DFi[2][2] = {{m.y2 / J, -m.x2 / J}, {-m.y1 / J, m.x1 / J}};
                uh[0] = u[0];
                uh[1] = u[1];
                for (int r = 0; r < 2; ++r)
                    for (int cdir = 0; cdir < 2; ++cdir)
                        duh[2 * r + cdir] =
                            du_dxi[r][0] * DFi[0][cdir] + du_dxi[r][1] * DFi[1][cdir];

                // p = phat / J
                ph = fp.value / J;
                const double dpar[2] = {(fp.gradient[0] * J - fp.value * dJ[0]) / (J * J),
                                        (fp.gradient[1] * J - fp.value * dJ[1]) / (J * J)};
                dph[0] = (m.y2 * dpar[0] - m.y1 * dpar[1]) / J;
                dph[1] = (-m.x2 * dpar[0] + m.x1 * dpar[1]) / J;

                if (has_w) {
                    wh = fw.value;
                    const double dwpar[2] = {fw.gradient[0], fw.gradient[1]};
                    dwh[0] = (m.y2 * dwpar[0] - m.y1 * dwpar[1]) / J;
                    dwh[1] = (-m.x2 * dwpar[0] + m.x1 * dwpar[1]) / J;
                }
            }

            if (pressure_is_total) {
                // kinematic p = P - |u|^2/2
                const double dkx = uh[0] * duh[0] + uh[1] * duh[2];
                const double dky = uh[0] * duh[1] + uh[1] * duh[3];
                ph -= 0.5 * (uh[0] * uh[0] + uh[1] * uh[1]);
                dph[0] -= dkx;
                dph[1] -= dky;
            }

            const auto ue = exact.velocity(px, py);
            const auto due = exact.velocity_grad(px, py);
            const double pe = exact.pressure(px, py);
            const auto dpe = exact.pressure_grad(px, py);

            area += weight;
            vel_sq += weight * ((uh[0] - ue[0]) * (uh[0] - ue[0]) +
                                (uh[1] - ue[1]) * (uh[1] - ue[1]));
            for (int t = 0; t < 4; ++t)
                vel_h1 += weight * (duh[t] - due[t]) * (duh[t] - due[t]);
            pres.add(ph - pe, weight);
            pres_h1 += weight * ((dph[0] - dpe[0]) * (dph[0] - dpe[0]) +
                                 (dph[1] - dpe[1]) * (dph[1] - dpe[1]));
            if (has_w && exact.vorticity) {
                const double we = exact.vorticity(px, py);
                const auto dwe = exact.vorticity_grad(px, py);
                vort.add(wh - we, weight);
                vort_h1 += weight * ((dwh[0] - dwe[0]) * (dwh[0] - dwe[0]) +
                                     (dwh[1] - dwe[1]) * (dwh[1] - dwe[1]));
            }
        }

    ErrorReport rep;
    rep.formulation = formulation;
    rep.kprime = spaces.kprime;
    rep.mesh_h = 1.0 / (span_breaks(spaces.psi.kv[0]).size() - 1);
    rep.velocity.l2 = std::sqrt(vel_sq);
    rep.velocity.h1 = std::sqrt(vel_h1);
    rep.pressure.l2 = pres.l2_aligned(area);
    rep.pressure.h1 = std::sqrt(pres_h1);
    if (has_w && exact.vorticity) {
        rep.has_vorticity = true;
        rep.vorticity.l2 = vort.l2_plain();
        rep.vorticity.h1 = std::sqrt(vort_h1);
    }
    return rep;
}

ErrorReport error_norms_3d(const ComplexSpaces3D& spaces, const DiscreteSolution3D& sol,
                           Formulation formulation, bool pressure_is_total, const Exact3D& exact,
                           int quad_per_span) {
    if (quad_per_span <= 0)
        quad_per_span = spaces.kprime + 3;
    const bool has_w = formulation == Formulation::VVP && !sol.wx.empty();
    const QuadGrid qx = quad_1d(spaces.phi.kv[0], quad_per_span);
    const QuadGrid qy = quad_1d(spaces.phi.kv[1], quad_per_span);
    const QuadGrid qz = quad_1d(spaces.phi.kv[2], quad_per_span);

    double area = 0.0, vel_sq = 0.0, vel_h1 = 0.0, pres_h1 = 0.0, vort_sq = 0.0, vort_h1 = 0.0;
    Accum pres;

    const TensorSpace* wsp[3] = {&spaces.omega[0], &spaces.omega[1], &spaces.omega[2]};
    const std::vector<double>* wco[3] = {&sol.wx, &sol.wy, &sol.wz};

    for (std::size_t k = 0; k < qz.nodes.size(); ++k)
        for (std::size_t j = 0; j < qy.nodes.size(); ++j)
            for (std::size_t i = 0; i < qx.nodes.size(); ++i) {
                const std::array<double, 3> p{qx.nodes[i], qy.nodes[j], qz.nodes[k]};
                const double w = qx.weights[i] * qy.weights[j] * qz.weights[k];
                area += w;

                const FieldSample f[3] = {eval_field(spaces.vel[0], sol.ux, p, 1),
                                          eval_field(spaces.vel[1], sol.uy, p, 1),
                                          eval_field(spaces.vel[2], sol.uz, p, 1)};
                const FieldSample fp = eval_field(spaces.pres, sol.p, p, 1);

                const auto ue = exact.velocity(p[0], p[1], p[2]);
                const auto due = exact.velocity_grad(p[0], p[1], p[2]);
                double ph = fp.value;
                std::array<double, 3> dph{fp.gradient[0], fp.gradient[1], fp.gradient[2]};
                if (pressure_is_total) {
                    double k2 = 0.0;
                    for (int r = 0; r < 3; ++r)
                        k2 += f[r].value * f[r].value;
                    ph -= 0.5 * k2;
                    for (int d = 0; d < 3; ++d)
                        for (int r = 0; r < 3; ++r)
                            dph[d] -= f[r].value * f[r].gradient[d];
                }
                const double pe = exact.pressure(p[0], p[1], p[2]);
                const auto dpe = exact.pressure_grad(p[0], p[1], p[2]);

                for (int r = 0; r < 3; ++r) {
                    vel_sq += w * (f[r].value - ue[r]) * (f[r].value - ue[r]);
                    for (int d = 0; d < 3; ++d)
                        vel_h1 +=
                            w * (f[r].gradient[d] - due[3 * r + d]) * (f[r].gradient[d] - due[3 * r + d]);
                }
                pres.add(ph - pe, w);
                for (int d = 0; d < 3; ++d)
                    pres_h1 += w * (dph[d] - dpe[d]) * (dph[d] - dpe[d]);

                if (has_w && exact.vorticity) {
                    const auto we = exact.vorticity(p[0], p[1], p[2]);
                    const auto dwe = exact.vorticity_grad(p[0], p[1], p[2]);
                    for (int r = 0; r < 3; ++r) {
                        const FieldSample fw = eval_field(*wsp[r], *wco[r], p, 1);
                        vort_sq += w * (fw.value - we[r]) * (fw.value - we[r]);
                        for (int d = 0; d < 3; ++d)
                            vort_h1 += w * (fw.gradient[d] - dwe[3 * r + d]) *
                                       (fw.gradient[d] - dwe[3 * r + d]);
                    }
                }
            }

    ErrorReport rep;
    rep.formulation = formulation;
    rep.kprime = spaces.kprime;
    rep.mesh_h = 1.0 / (span_breaks(spaces.phi.kv[0]).size() - 1);
    rep.velocity.l2 = std::sqrt(vel_sq);
    rep.velocity.h1 = std::sqrt(vel_h1);
    rep.pressure.l2 = pres.l2_aligned(area);
    rep.pressure.h1 = std::sqrt(pres_h1);
    if (has_w && exact.vorticity) {
        rep.has_vorticity = true;
        rep.vorticity.l2 = std::sqrt(vort_sq);
        rep.vorticity.h1 = std::sqrt(vort_h1);
    }
    return rep;
}

namespace {

std::optional<double> rate_of(double coarse, double fine) {
    const double floor = 1e-13 * std::max(1.0, std::max(coarse, fine));
    if (coarse <= floor || fine <= floor)
        return std::nullopt; // exactly representable: rate undefined
    return std::log2(coarse / fine);
}

} // namespace

RateReport convergence_rates(std::span<const ErrorReport> reports) {
    if (reports.size() < 2)
        throw InvalidInput("convergence_rates needs at least two reports");
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (std::abs(reports[i - 1].mesh_h / reports[i].mesh_h - 2.0) > 1e-9)
            throw InvalidInput("convergence_rates expects mesh halving");

    const ErrorReport& a = reports[reports.size() - 2];
    const ErrorReport& b = reports[reports.size() - 1];
    RateReport r;
    r.velocity_l2 = rate_of(a.velocity.l2, b.velocity.l2);
    r.velocity_h1 = rate_of(a.velocity.h1, b.velocity.h1);
    r.pressure_l2 = rate_of(a.pressure.l2, b.pressure.l2);
    r.pressure_h1 = rate_of(a.pressure.h1, b.pressure.h1);
    if (a.has_vorticity && b.has_vorticity) {
        r.vorticity_l2 = rate_of(a.vorticity.l2, b.vorticity.l2);
        r.vorticity_h1 = rate_of(a.vorticity.h1, b.vorticity.h1);
    }
    return r;
}

std::vector<ProfilePoint> centerline_profile(const ComplexSpaces2D& spaces,
                                             const DiscreteSolution2D& sol, ProfileLine line,
                                             int n_samples) {
    std::vector<ProfilePoint> out(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = n_samples == 1 ? 0.5 : static_cast<double>(i) / (n_samples - 1);
        if (line == ProfileLine::VerticalUx) {
            out[i] = {t, eval_field(spaces.vel_x, sol.ux, std::array<double, 2>{0.5, t}, 0).value};
        } else {
            out[i] = {t, eval_field(spaces.vel_y, sol.uy, std::array<double, 2>{t, 0.5}, 0).value};
        }
    }
    return out;
}

std::vector<ProfilePoint> centerline_profile(const ComplexSpaces3D& spaces,
                                             const DiscreteSolution3D& sol, ProfileLine line,
                                             int n_samples) {
    std::vector<ProfilePoint> out(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = n_samples == 1 ? 0.5 : static_cast<double>(i) / (n_samples - 1);
        if (line == ProfileLine::VerticalUx) {
            out[i] = {t,
                      eval_field(spaces.vel[0], sol.ux, std::array<double, 3>{0.5, t, 0.5}, 0).value};
        } else {
            out[i] = {t,
                      eval_field(spaces.vel[1], sol.uy, std::array<double, 3>{t, 0.5, 0.5}, 0).value};
        }
    }
    return out;
}

namespace {

// golden-section minimum refinement to 1e-10 coordinate tolerance
double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

double refine_extremum(const std::function<double(double)>& f, bool maximize) {
    const int n = 4096;
    int best = 0;
    double fbest = maximize ? -1e300 : 1e300;
    for (int i = 0; i <= n; ++i) {
        const double v = f(static_cast<double>(i) / n);
        if (maximize ? v > fbest : v < fbest) {
            fbest = v;
            best = i;
        }
    }
    const double a = std::max(0.0, (best - 1.0) / n);
    const double b = std::min(1.0, (best + 1.0) / n);
    if (maximize)
        return -golden_min([&](double t) { return -f(t); }, a, b);
    return golden_min(f, a, b);
}

} // namespace

CavityExtrema velocity_extrema(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol) {
    CavityExtrema e;
    auto ux = [&](double y) {
        return eval_field(spaces.vel_x, sol.ux, std::array<double, 2>{0.5, y}, 0).value;
    };
    auto uy = [&](double x) {
        return eval_field(spaces.vel_y, sol.uy, std::array<double, 2>{x, 0.5}, 0).value;
    };
    e.ux_min_vertical = refine_extremum(ux, false);
    e.uy_max_horizontal = refine_extremum(uy, true);
    e.uy_min_horizontal = refine_extremum(uy, false);
    return e;
}

double streamfunction_at(const ComplexSpaces2D& spaces, std::span<const double> ux_coeffs,
                         double x, double y) {
    const KnotVector& kv = spaces.vel_x.kv[1];
    const std::vector<double> b = span_breaks(kv);
    const int nq = spaces.kprime + 2;
    std::vector<double> nodes, weights;
    double psi = 0.0;
    for (std::size_t s = 0; s + 1 < b.size() && b[s] < y; ++s) {
        const double hi = std::min(b[s + 1], y);
        gauss_on_interval(nq, b[s], hi, nodes, weights);
        for (std::size_t g = 0; g < nodes.size(); ++g)
            psi += weights[g] *
                   eval_field(spaces.vel_x, ux_coeffs, std::array<double, 2>{x, nodes[g]}, 0).value;
    }
    return psi;
}

std::vector<ReferenceRow> load_reference_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MalformedData("cannot open reference file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw MalformedData(path + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "coord,value,re,component,source")
        throw MalformedData(path + ":1: expected header coord,value,re,component,source");

    std::vector<ReferenceRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> parts;
        while (std::getline(ss, field, ','))
            parts.push_back(field);
        if (parts.size() != 5)
            throw MalformedData(path + ":" + std::to_string(lineno) + ": expected 5 fields");
        ReferenceRow r;
        try {
            r.coord = std::stod(parts[0]);
            r.value = std::stod(parts[1]);
            r.re = std::stod(parts[2]);
        } catch (const std::exception&) {
            throw MalformedData(path + ":" + std::to_string(lineno) + ": bad numeric field");
        }
        r.component = parts[3];
        r.source = parts[4];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_reference_profiles(const std::string& path, std::span<const ReferenceRow> rows) {
    std::ofstream out(path);
    if (!out)
        throw MalformedData("cannot write reference file: " + path);
    out << "coord,value,re,component,source\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.coord << ',' << r.value << ',' << r.re << ',' << r.component << ',' << r.source
            << '\n';
}

namespace {

std::vector<double> uniform_breaks(int elements) {
    std::vector<double> bp(elements + 1);
    for (int i = 0; i <= elements; ++i)
        bp[i] = static_cast<double>(i) / elements;
    return bp;
}

std::vector<double> cavity_breaks(int mesh, bool stretched) {
    return stretched ? stretched_breakpoints(mesh) : uniform_breaks(mesh);
}

} // namespace

CaseDefinition2D make_vortex_case_2d(const ManufacturedCase2D& mc, Formulation formulation,
                                     int kprime, int mesh, double penalty) {
    CaseDefinition2D c;
    c.formulation = formulation;
    c.nu = mc.nu;
    c.forcing = formulation == Formulation::VP ? mc.forcing_vp : mc.forcing_vvp;
    c.dirichlet = mc.exact.velocity;
    c.penalty_constant = penalty > 0.0 ? penalty : default_penalty(kprime);
    const auto bp = uniform_breaks(mesh);
    c.spaces = build_complex_2d(kprime, bp, bp);
    return c;
}

CaseDefinition2D make_cavity_case_2d(double re, Formulation formulation, int kprime, int mesh,
                                     bool stretched, double penalty, double lid_speed) {
    if (re <= 0.0)
        throw InvalidInput("cavity: Re must be positive");
    CaseDefinition2D c;
    c.formulation = formulation;
    c.nu = 1.0 / re;
    c.forcing = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    // walls win at the lid corners (watertight cavity)
    c.dirichlet = [lid_speed](double x, double y) {
        const double eps = 1e-12;
        if (x <= eps || x >= 1.0 - eps)
            return std::array<double, 2>{0.0, 0.0};
        if (y >= 1.0 - eps)
            return std::array<double, 2>{lid_speed, 0.0};
        return std::array<double, 2>{0.0, 0.0};
    };
    c.penalty_constant = penalty > 0.0 ? penalty : default_penalty(kprime);
    const auto bp = cavity_breaks(mesh, stretched);
    c.spaces = build_complex_2d(kprime, bp, bp);
    return c;
}

CaseDefinition3D make_vortex_case_3d(const ManufacturedCase3D& mc, Formulation formulation,
                                     int kprime, int mesh, double penalty) {
    CaseDefinition3D c;
    c.formulation = formulation;
    c.nu = mc.nu;
    c.forcing = formulation == Formulation::VP ? mc.forcing_vp : mc.forcing_vvp;
    c.dirichlet = mc.exact.velocity;
    c.penalty_constant = penalty > 0.0 ? penalty : default_penalty(kprime);
    const auto bp = uniform_breaks(mesh);
    c.spaces = build_complex_3d(kprime, bp, bp, bp);
    return c;
}

CaseDefinition3D make_cavity_case_3d(double re, Formulation formulation, int kprime, int mesh,
                                     bool stretched, double penalty, double lid_speed) {
    if (re <= 0.0)
        throw InvalidInput("cavity: Re must be positive");
    CaseDefinition3D c;
    c.formulation = formulation;
    c.nu = 1.0 / re;
    c.forcing = [](double, double, double) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
    c.dirichlet = [lid_speed](double x, double y, double z) {
        const double eps = 1e-12;
        if (x <= eps || x >= 1.0 - eps || z <= eps || z >= 1.0 - eps)
            return std::array<double, 3>{0.0, 0.0, 0.0};
        if (y >= 1.0 - eps)
            return std::array<double, 3>{lid_speed, 0.0, 0.0};
        return std::array<double, 3>{0.0, 0.0, 0.0};
    };
    c.penalty_constant = penalty > 0.0 ? penalty : default_penalty(kprime);
    const auto bp = cavity_breaks(mesh, stretched);
    c.spaces = build_complex_3d(kprime, bp, bp, bp);
    return c;
}

namespace {

double penalty_row_scale(const DofMap& dm, double cpen, bool vp) {
    double scale = 0.0;
    for (const auto& eq : dm.equations) {
        double row = 0.0;
        for (int i = 0; i < eq.num_faces; ++i) {
            const double ph = cpen / eq.faces[i].h;
            row += (vp && (eq.kind == EqKind::MomentumX || eq.kind == EqKind::MomentumY ||
                           eq.kind == EqKind::MomentumZ))
                       ? ph * ph
                       : ph;
        }
        scale = std::max(scale, row);
    }
    return scale;
}

} // namespace

double residual_floor_2d(const CaseDefinition2D& c, const DofMap& dm) {
    const double cpen = c.penalty_constant > 0.0 ? c.penalty_constant
                                                 : default_penalty(c.spaces.kprime);
    double gmax = 0.0, fmax = 0.0;
    for (const auto& eq : dm.equations) {
        const auto f = c.forcing(eq.x[0], eq.x[1]);
        fmax = std::max({fmax, std::abs(f[0]), std::abs(f[1])});
        if (eq.num_faces > 0) {
            const auto g = c.dirichlet(eq.x[0], eq.x[1]);
            gmax = std::max({gmax, std::abs(g[0]), std::abs(g[1])});
        }
    }
    const double scale = penalty_row_scale(dm, cpen, c.formulation == Formulation::VP);
    return 512.0 * 2.2e-16 * std::max(scale * (1.0 + gmax), fmax);
}

double residual_floor_3d(const CaseDefinition3D& c, const DofMap& dm) {
    const double cpen = c.penalty_constant > 0.0 ? c.penalty_constant
                                                 : default_penalty(c.spaces.kprime);
    double gmax = 0.0, fmax = 0.0;
    for (const auto& eq : dm.equations) {
        const auto f = c.forcing(eq.x[0], eq.x[1], eq.x[2]);
        fmax = std::max({fmax, std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
        if (eq.num_faces > 0) {
            const auto g = c.dirichlet(eq.x[0], eq.x[1], eq.x[2]);
            gmax = std::max({gmax, std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
        }
    }
    const double scale = penalty_row_scale(dm, cpen, c.formulation == Formulation::VP);
    return 512.0 * 2.2e-16 * std::max(scale * (1.0 + gmax), fmax);
}

SolveOutcome2D solve_case_2d(const CaseDefinition2D& c, const NewtonSettings& settings) {
    const DofMap dm = build_dof_map(c);
    NewtonSettings s = settings;
    s.abs_tol = std::max(s.abs_tol, residual_floor_2d(c, dm));
    ResidualFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                        Eigen::SparseMatrix<double>* jac) {
        const DiscreteSolution2D sol = solution_from_vector(c, dm, x);
        AssemblyResult res = assemble_2d(c, dm, sol, jac != nullptr);
        r = std::move(res.residual);
        if (jac)
            *jac = std::move(res.jacobian);
    };
    auto [x, report] = newton_solve(fn, Eigen::VectorXd::Zero(dm.num_unknowns()), s);
    return {solution_from_vector(c, dm, x), std::move(report)};
}

SolveOutcome3D solve_case_3d(const CaseDefinition3D& c, const NewtonSettings& settings) {
    const DofMap dm = build_dof_map_3d(c);
    NewtonSettings s = settings;
    s.abs_tol = std::max(s.abs_tol, residual_floor_3d(c, dm));
    ResidualFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                        Eigen::SparseMatrix<double>* jac) {
        const DiscreteSolution3D sol = solution_from_vector(c, dm, x);
        AssemblyResult res = assemble_3d(c, dm, sol, jac != nullptr);
        r = std::move(res.residual);
        if (jac)
            *jac = std::move(res.jacobian);
    };
    auto [x, report] = newton_solve(fn, Eigen::VectorXd::Zero(dm.num_unknowns()), s);
    return {solution_from_vector(c, dm, x), std::move(report)};
}

SolveOutcomeMapped solve_mapped_case(const MappedStokesCase& c, const NewtonSettings& settings) {
    const DofMap dm = build_mapped_dof_map(c);
    ResidualFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                        Eigen::SparseMatrix<double>* jac) {
        const DiscreteSolution2D sol = solution_from_vector(c, dm, x);
        AssemblyResult res = assemble_mapped_vvp_stokes(c, dm, sol, jac != nullptr);
        r = std::move(res.residual);
        if (jac)
            *jac = std::move(res.jacobian);
    };
    auto [x, report] = newton_solve(fn, Eigen::VectorXd::Zero(dm.num_unknowns()), settings);
    return {solution_from_vector(c, dm, x), std::move(report)};
}

SolveOutcome2D solve_case_2d_continuation(const std::function<CaseDefinition2D(double)>& family,
                                          std::span<const double> ladder,
                                          const NewtonSettings& settings) {
    if (ladder.empty())
        throw InvalidInput("continuation: empty ladder");
    const CaseDefinition2D probe = family(ladder.back());
    const DofMap dm = build_dof_map(probe);
    NewtonSettings s = settings;
    s.abs_tol = std::max(s.abs_tol, residual_floor_2d(probe, dm));

    std::vector<CaseDefinition2D> cases; // keep stage cases alive for the callbacks
    cases.reserve(ladder.size());
    auto make_fn = [&](double re) -> ResidualFn {
        cases.push_back(family(re));
        const CaseDefinition2D* cc = &cases.back();
        return [cc, &dm](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                         Eigen::SparseMatrix<double>* jac) {
            const DiscreteSolution2D sol = solution_from_vector(*cc, dm, x);
            AssemblyResult res = assemble_2d(*cc, dm, sol, jac != nullptr);
            r = std::move(res.residual);
            if (jac)
                *jac = std::move(res.jacobian);
        };
    };
    const ContinuationResult out =
        continuation_solve(make_fn, ladder, Eigen::VectorXd::Zero(dm.num_unknowns()), s);
    return {solution_from_vector(probe, dm, out.solution), out.final_report};
}

SolveOutcome3D solve_case_3d_continuation(const std::function<CaseDefinition3D(double)>& family,
                                          std::span<const double> ladder,
                                          const NewtonSettings& settings) {
    if (ladder.empty())
        throw InvalidInput("continuation: empty ladder");
    const CaseDefinition3D probe = family(ladder.back());
    const DofMap dm = build_dof_map_3d(probe);
    NewtonSettings s = settings;
    s.abs_tol = std::max(s.abs_tol, residual_floor_3d(probe, dm));

    std::vector<CaseDefinition3D> cases;
    cases.reserve(ladder.size());
    auto make_fn = [&](double re) -> ResidualFn {
        cases.push_back(family(re));
        const CaseDefinition3D* cc = &cases.back();
        return [cc, &dm](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                         Eigen::SparseMatrix<double>* jac) {
            const DiscreteSolution3D sol = solution_from_vector(*cc, dm, x);
            AssemblyResult res = assemble_3d(*cc, dm, sol, jac != nullptr);
            r = std::move(res.residual);
            if (jac)
                *jac = std::move(res.jacobian);
        };
    };
    const ContinuationResult out =
        continuation_solve(make_fn, ladder, Eigen::VectorXd::Zero(dm.num_unknowns()), s);
    return {solution_from_vector(probe, dm, out.solution), out.final_report};
}

} // namespace divcol
