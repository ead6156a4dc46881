#include "divcol/mapped.hpp"

#include "divcol/errors.hpp"
#include "field_eval.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace divcol {

GeometryMap2D identity_map() {
    GeometryMap2D m;
    m.name = "identity";
    m.jet = [](double x, double y) {
        MapJet j;
        j.x = x;
        j.y = y;
        return j;
    };
    return m;
}

GeometryMap2D polar_map(double r_in, double r_out) {
    if (!(0.0 < r_in && r_in < r_out))
        throw InvalidInput("polar_map needs 0 < r_in < r_out");
    GeometryMap2D m;
    m.name = "polar";
    const double a = r_out - r_in;
    m.jet = [a, r_in](double xi1, double xi2) {
        const double t = 2.0 * M_PI * xi1;
        const double R = a * xi2 + r_in;
        const double st = std::sin(t), ct = std::cos(t);
        MapJet j;
        j.x = R * st;
        j.y = R * ct;
        j.x1 = 2.0 * M_PI * R * ct;
        j.x2 = a * st;
        j.y1 = -2.0 * M_PI * R * st;
        j.y2 = a * ct;
        j.x11 = -4.0 * M_PI * M_PI * R * st;
        j.x12 = 2.0 * M_PI * a * ct;
        j.x22 = 0.0;
        j.y11 = -4.0 * M_PI * M_PI * R * ct;
        j.y12 = -2.0 * M_PI * a * st;
        j.y22 = 0.0;
        return j;
    };
    return m;
}

GeometryMap2D wavy_map(double A, double B, double C) {
    GeometryMap2D m;
    m.name = "wavy";
    m.jet = [A, B, C](double xi1, double xi2) {
        const double s = std::sin(C * M_PI * xi1);
        const double c = std::cos(C * M_PI * xi1);
        MapJet j;
        j.x = xi1;
        j.y = A * (B * (1.0 - xi2) * s + xi2);
        j.x1 = 1.0;
        j.x2 = 0.0;
        j.y1 = A * B * C * M_PI * (1.0 - xi2) * c;
        j.y2 = A * (1.0 - B * s);
        j.x11 = j.x12 = j.x22 = 0.0;
        j.y11 = -A * B * C * C * M_PI * M_PI * (1.0 - xi2) * s;
        j.y12 = -A * B * C * M_PI * c;
        j.y22 = 0.0;
        return j;
    };
    // reject parameter sets with a folded geometry
    const int ns = 33;
    for (int i = 0; i <= ns; ++i)
        for (int k = 0; k <= ns; ++k) {
            const MapJet j = m.jet(static_cast<double>(i) / ns, static_cast<double>(k) / ns);
            if (!(j.jac() > 1e-12))
                throw InvalidGeometry("wavy_map: non-positive Jacobian at sample point");
        }
    return m;
}

std::array<double, 2> pullback_velocity(const MapJet& m, const std::array<double, 2>& v) {
    // J DF^{-1} v = adj(DF) v
    return {m.y2 * v[0] - m.x2 * v[1], -m.y1 * v[0] + m.x1 * v[1]};
}

std::array<double, 2> pushforward_velocity(const MapJet& m, const std::array<double, 2>& vhat) {
    const double J = m.jac();
    if (J == 0.0)
        throw InvalidGeometry("pushforward_velocity: singular Jacobian");
    return {(m.x1 * vhat[0] + m.x2 * vhat[1]) / J, (m.y1 * vhat[0] + m.y2 * vhat[1]) / J};
}

double pullback_pressure(const MapJet& m, double q) { return m.jac() * q; }

double pushforward_pressure(const MapJet& m, double qhat) {
    const double J = m.jac();
    if (J == 0.0)
        throw InvalidGeometry("pushforward_pressure: singular Jacobian");
    return qhat / J;
}

namespace {

enum Field2D { UX = 0, UY = 1, PRES = 2, OMEGA = 3 };

double penalty_of(const MappedStokesCase& c) {
    return c.penalty_constant > 0.0 ? c.penalty_constant : default_penalty(c.spaces.kprime);
}

void validate_case(const MappedStokesCase& c) {
    if (c.nu <= 0.0)
        throw InvalidInput("viscosity must be positive");
    if (c.spaces.kprime < 1)
        throw UnsupportedDegree("k' >= 1 required");
    for (int e = 0; e < 4; ++e)
        if (c.edge_bc[e] == EdgeBC::Dirichlet && !c.edge_dirichlet[e])
            throw InvalidInput("Dirichlet edge " + std::to_string(e) + " has no boundary data");
}

// Parametric CCW tangent of the unit square boundary per (dir, side).
std::array<double, 2> param_ccw_tangent(int dir, int side) {
    if (dir == 1 && side == 0)
        return {1.0, 0.0};
    if (dir == 0 && side == 1)
        return {0.0, 1.0};
    if (dir == 1 && side == 1)
        return {-1.0, 0.0};
    return {0.0, -1.0};
}

// Fix normal-component coefficients on Dirichlet faces via 1D trace
// interpolation of ghat = pullback(g) along the face.
void fix_mapped_traces(const MappedStokesCase& c, int comp, DofMap::FieldDofs& fd) {
    const TensorSpace& sp = comp == UX ? c.spaces.vel_x : c.spaces.vel_y;
    const int t = 1 - comp;
    const KnotVector& kvt = sp.kv[t];
    const std::vector<double> pts = greville_abscissae(kvt);
    const int nt = kvt.count();
    const int nc = sp.kv[comp].count();

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nt, nt);
    BasisEval be;
    for (int a = 0; a < nt; ++a) {
        eval_basis(kvt, pts[a], 0, be);
        const int off = be.first_basis(kvt.degree);
        for (int j = 0; j <= kvt.degree; ++j)
            B(a, off + j) = be.values[j];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible())
        throw AssemblyError("singular mapped trace interpolation system");

    for (int side = 0; side < 2; ++side) {
        const int edge = 2 * comp + side;
        if (c.edge_bc[edge] != EdgeBC::Dirichlet)
            continue;
        const double face = side == 0 ? sp.kv[comp].domain_begin() : sp.kv[comp].domain_end();
        Eigen::VectorXd rhs(nt);
        for (int a = 0; a < nt; ++a) {
            const double xi1 = comp == UX ? face : pts[a];
            const double xi2 = comp == UX ? pts[a] : face;
            const MapJet jet = c.map.jet(xi1, xi2);
            const auto g = c.edge_dirichlet[edge](jet.x, jet.y);
            rhs[a] = pullback_velocity(jet, g)[comp];
        }
        const Eigen::VectorXd coef = lu.solve(rhs);
        const int layer = side == 0 ? 0 : nc - 1;
        for (int a = 0; a < nt; ++a) {
            std::array<int, 3> midx{0, 0, 0};
            midx[comp] = layer;
            midx[t] = a;
            const long flat = midx[0] + static_cast<long>(sp.count(0)) * midx[1];
            fd.global[flat] = -1;
            fd.fixed[flat] = coef[a];
        }
    }
}

} // namespace

DofMap build_mapped_dof_map(const MappedStokesCase& c) {
    validate_case(c);

    DofMap dm;
    dm.gauge = c.gauge;
    dm.pressure_field = PRES;
    dm.fields.resize(4);
    const TensorSpace* sps[4] = {&c.spaces.vel_x, &c.spaces.vel_y, &c.spaces.pres, &c.spaces.psi};
    for (int f = 0; f < 4; ++f) {
        dm.fields[f].global.assign(sps[f]->dim(), 0);
        dm.fields[f].fixed.assign(sps[f]->dim(), 0.0);
    }

    fix_mapped_traces(c, UX, dm.fields[UX]);
    fix_mapped_traces(c, UY, dm.fields[UY]);
    if (c.gauge == GaugeMode::PinFirstDof)
        dm.fields[PRES].global[0] = -1;

    int next = 0;
    for (auto& fd : dm.fields) {
        fd.num_free = 0;
        for (auto& g : fd.global)
            if (g >= 0) {
                g = next++;
                ++fd.num_free;
            }
    }
    dm.num_free = next;

    // momentum rows: skip points on Dirichlet no-penetration faces; Neumann
    // edges keep their points and tag the normal-direction momentum row
    for (int comp = 0; comp < 2; ++comp) {
        const TensorSpace& sp = *sps[comp];
        const auto [h_lo, h_hi] = detail::wall_greville_gaps(sp.kv[comp]);
        const double gap[2] = {h_lo, h_hi};
        for (const GrevillePoint& g : greville_grid(sp)) {
            bool removed = false;
            CollocEq eq;
            eq.kind = comp == UX ? EqKind::MomentumX : EqKind::MomentumY;
            eq.x = g.x;
            eq.idx = g.idx;
            for (int side = 0; side < 2; ++side) {
                if (!g.on_face(comp, side))
                    continue;
                if (c.edge_bc[2 * comp + side] == EdgeBC::Dirichlet)
                    removed = true;
                else
                    eq.faces[eq.num_faces++] = {comp, side, gap[side], PenaltyKind::PressureNormal};
            }
            if (!removed)
                dm.equations.push_back(eq);
        }
    }

    {
        bool first = true;
        for (const GrevillePoint& g : greville_grid(c.spaces.pres)) {
            if (first && c.gauge == GaugeMode::PinFirstDof) {
                first = false;
                continue;
            }
            first = false;
            CollocEq eq;
            eq.kind = EqKind::Continuity;
            eq.x = g.x;
            eq.idx = g.idx;
            dm.equations.push_back(eq);
        }
    }

    {
        const TensorSpace& sp = c.spaces.psi;
        const auto [hx_lo, hx_hi] = detail::wall_greville_gaps(sp.kv[0]);
        const auto [hy_lo, hy_hi] = detail::wall_greville_gaps(sp.kv[1]);
        const double gaps[2][2] = {{hx_lo, hx_hi}, {hy_lo, hy_hi}};
        for (const GrevillePoint& g : greville_grid(sp)) {
            CollocEq eq;
            eq.kind = EqKind::ConstitutiveX;
            eq.x = g.x;
            eq.idx = g.idx;
            for (int dir = 0; dir < 2; ++dir)
                for (int side = 0; side < 2; ++side)
                    if (g.on_face(dir, side) && c.edge_bc[2 * dir + side] == EdgeBC::Dirichlet)
                        eq.faces[eq.num_faces++] = {dir, side, gaps[dir][side],
                                                    PenaltyKind::TangentialVelocity};
            dm.equations.push_back(eq);
        }
    }

    if (c.gauge == GaugeMode::ZeroMean) {
        const std::vector<double> wx = basis_integrals(c.spaces.pres.kv[0]);
        const std::vector<double> wy = basis_integrals(c.spaces.pres.kv[1]);
        dm.gauge_weights.resize(c.spaces.pres.dim());
        for (int j = 0; j < c.spaces.pres.count(1); ++j)
            for (int i = 0; i < c.spaces.pres.count(0); ++i)
                dm.gauge_weights[i + static_cast<long>(c.spaces.pres.count(0)) * j] = wx[i] * wy[j];
    }

    if (dm.num_equations() != dm.num_unknowns())
        throw AssemblyError("mapped collocation system is not square: " +
                            std::to_string(dm.num_equations()) + " equations vs " +
                            std::to_string(dm.num_unknowns()) + " unknowns");
    return dm;
}

namespace {

struct MappedAssembler {
    const MappedStokesCase& c;
    const DofMap& dm;
    const DiscreteSolution2D& sol;
    bool want_jac;
    Eigen::VectorXd r;
    std::vector<Eigen::Triplet<double>> trips;

    MappedAssembler(const MappedStokesCase& c_, const DofMap& dm_, const DiscreteSolution2D& s_,
                    bool wj)
        : c(c_), dm(dm_), sol(s_), want_jac(wj) {
        r = Eigen::VectorXd::Zero(dm.num_equations());
        if (want_jac)
            trips.reserve(static_cast<std::size_t>(dm.num_equations()) *
                          (c.spaces.kprime + 2) * (c.spaces.kprime + 2) * 3);
    }

    void add(int row, int field, long flat, double value) {
        const int col = dm.fields[field].global[flat];
        if (col >= 0)
            trips.emplace_back(row, col, value);
    }

    void run() {
        const double cpen = penalty_of(c);
        for (std::size_t row = 0; row < dm.equations.size(); ++row) {
            const CollocEq& eq = dm.equations[row];
            switch (eq.kind) {
            case EqKind::MomentumX:
            case EqKind::MomentumY:
                momentum(static_cast<int>(row), eq, cpen);
                break;
            case EqKind::Continuity:
                continuity(static_cast<int>(row), eq);
                break;
            case EqKind::ConstitutiveX:
                constitutive(static_cast<int>(row), eq, cpen);
                break;
            default:
                throw AssemblyError("unexpected equation kind in mapped assembly");
            }
        }
        if (dm.gauge == GaugeMode::ZeroMean) {
            const int row = static_cast<int>(dm.equations.size());
            double res = 0.0;
            for (std::size_t i = 0; i < dm.gauge_weights.size(); ++i)
                res += dm.gauge_weights[i] * sol.p[i];
            r[row] = res;
            if (want_jac)
                for (std::size_t i = 0; i < dm.gauge_weights.size(); ++i)
                    add(row, PRES, static_cast<long>(i), dm.gauge_weights[i]);
        }
    }

    void momentum(int row, const CollocEq& eq, double cpen) {
        const int comp = eq.kind == EqKind::MomentumX ? UX : UY;
        const double xi1 = eq.x[0], xi2 = eq.x[1];
        const MapJet m = c.map.jet(xi1, xi2);
        const double J = m.jac();
        if (J <= 0.0)
            throw InvalidGeometry("non-positive Jacobian at a collocation point");
        const auto dJ = m.djac();
        const double Ji = 1.0 / J;
        const std::array<double, 2> dJi{-Ji * Ji * dJ[0], -Ji * Ji * dJ[1]};

        detail::Active2D aw, ap;
        aw.init(c.spaces.psi, xi1, xi2, 1);
        ap.init(c.spaces.pres, xi1, xi2, 1);
        const auto w = aw.field(sol.w);
        const auto p = ap.field(sol.p);

        // D_d = d(J^{-1} phat)/d xi_d
        const double D1 = Ji * p.dx + p.v * dJi[0];
        const double D2 = Ji * p.dy + p.v * dJi[1];

        // J C^{-1} = adj(C)/J:  (J C^{-1})_11 = C22/J etc.
        const double A11 = m.c22() * Ji, A12 = -m.c12() * Ji;
        const double A21 = -m.c12() * Ji, A22 = m.c11() * Ji;

        double res;
        if (comp == UX)
            res = c.nu * w.dy + A11 * D1 + A12 * D2;
        else
            res = -c.nu * w.dx + A21 * D1 + A22 * D2;

        // fhat = pullback of the physical forcing
        const auto fphys = c.forcing(m.x, m.y);
        const auto fhat = pullback_velocity(m, fphys);
        res -= fhat[comp];

        // pressure-gradient Neumann penalty on the normal-direction row:
        // (C/h) n . grad p with grad p = DF^{-T} (D1, D2)
        double pn_coef1 = 0.0, pn_coef2 = 0.0; // accumulated multipliers of D1, D2
        if (eq.num_faces > 0) {
            // physical gradient components
            const double gpx = Ji * (m.y2 * D1 - m.y1 * D2);
            const double gpy = Ji * (-m.x2 * D1 + m.x1 * D2);
            for (int i = 0; i < eq.num_faces; ++i) {
                const PenaltyFace& pf = eq.faces[i];
                // outward physical normal of a xi_dir = const edge
                double nx, ny;
                if (pf.dir == 0) {
                    nx = m.y2;
                    ny = -m.x2;
                } else {
                    nx = -m.y1;
                    ny = m.x1;
                }
                const double sign = pf.side == 0 ? -1.0 : 1.0;
                const double len = std::hypot(nx, ny);
                nx = sign * nx / len;
                ny = sign * ny / len;
                const double pen = cpen / pf.h;
                res += pen * (nx * gpx + ny * gpy);
                pn_coef1 += pen * Ji * (nx * m.y2 - ny * m.x2);
                pn_coef2 += pen * Ji * (-nx * m.y1 + ny * m.x1);
            }
        }
        r[row] = res;

        if (!want_jac)
            return;
        aw.for_active([&](long fl, double, double Nx, double Ny, double, double, double) {
            add(row, OMEGA, fl, comp == UX ? c.nu * Ny : -c.nu * Nx);
        });
        const double cD1 = (comp == UX ? A11 : A21) + pn_coef1;
        const double cD2 = (comp == UX ? A12 : A22) + pn_coef2;
        ap.for_active([&](long fl, double N, double Nx, double Ny, double, double, double) {
            const double d1 = Ji * Nx + N * dJi[0];
            const double d2 = Ji * Ny + N * dJi[1];
            add(row, PRES, fl, cD1 * d1 + cD2 * d2);
        });
    }

    void continuity(int row, const CollocEq& eq) {
        detail::Active2D ax, ay;
        ax.init(c.spaces.vel_x, eq.x[0], eq.x[1], 1);
        ay.init(c.spaces.vel_y, eq.x[0], eq.x[1], 1);
        const auto vx = ax.field(sol.ux);
        const auto vy = ay.field(sol.uy);
        double res = vx.dx + vy.dy;
        if (dm.gauge == GaugeMode::ZeroMean)
            res += sol.lambda;
        r[row] = res;
        if (!want_jac)
            return;
        ax.for_active([&](long f, double, double Nx, double, double, double, double) {
            add(row, UX, f, Nx);
        });
        ay.for_active([&](long f, double, double, double Ny, double, double, double) {
            add(row, UY, f, Ny);
        });
        if (dm.gauge == GaugeMode::ZeroMean)
            trips.emplace_back(row, dm.num_free, 1.0);
    }

    void constitutive(int row, const CollocEq& eq, double cpen) {
        const double xi1 = eq.x[0], xi2 = eq.x[1];
        const MapJet m = c.map.jet(xi1, xi2);
        const double J = m.jac();
        if (J <= 0.0)
            throw InvalidGeometry("non-positive Jacobian at a collocation point");
        const auto dJ = m.djac();
        const double Ji = 1.0 / J;

        detail::Active2D ax, ay, aw;
        ax.init(c.spaces.vel_x, xi1, xi2, 1);
        ay.init(c.spaces.vel_y, xi1, xi2, 1);
        aw.init(c.spaces.psi, xi1, xi2, 0);
        const auto vx = ax.field(sol.ux);
        const auto vy = ay.field(sol.uy);
        const auto w = aw.field(sol.w);

        // d(J^{-1} C_ab)/d xi_d
        auto djc = [&](double cab, double dcab, int d) { return Ji * dcab - Ji * Ji * dJ[d] * cab; };
        const double jc21 = Ji * m.c12(), jc22 = Ji * m.c22();
        const double jc11 = Ji * m.c11(), jc12 = Ji * m.c12();
        const double djc21_1 = djc(m.c12(), m.dc12(0), 0), djc22_1 = djc(m.c22(), m.dc22(0), 0);
        const double djc11_2 = djc(m.c11(), m.dc11(1), 1), djc12_2 = djc(m.c12(), m.dc12(1), 1);

        // T1 = d/dxi1 (J^{-1}(C21 ux + C22 uy)); T2 = d/dxi2 (J^{-1}(C11 ux + C12 uy))
        const double T1 = djc21_1 * vx.v + jc21 * vx.dx + djc22_1 * vy.v + jc22 * vy.dx;
        const double T2 = djc11_2 * vx.v + jc11 * vx.dy + djc12_2 * vy.v + jc12 * vy.dy;
        double res = w.v - Ji * (T1 - T2);

        // tangential velocity penalty with the physical tangent
        double px = 0.0, py = 0.0; // multipliers of the physical u components
        if (eq.num_faces > 0) {
            const auto uphys = pushforward_velocity(m, {vx.v, vy.v});
            for (int i = 0; i < eq.num_faces; ++i) {
                const PenaltyFace& pf = eq.faces[i];
                const auto tp = param_ccw_tangent(pf.dir, pf.side);
                double sx = m.x1 * tp[0] + m.x2 * tp[1];
                double sy = m.y1 * tp[0] + m.y2 * tp[1];
                const double len = std::hypot(sx, sy);
                sx /= len;
                sy /= len;
                const auto g = c.edge_dirichlet[2 * pf.dir + pf.side](m.x, m.y);
                const double pen = cpen / pf.h;
                res += pen * ((uphys[0] - g[0]) * sx + (uphys[1] - g[1]) * sy);
                px += pen * sx;
                py += pen * sy;
            }
        }
        r[row] = res;

        if (!want_jac)
            return;
        aw.for_active([&](long f, double N, double, double, double, double, double) {
            add(row, OMEGA, f, N);
        });
        // physical u from uhat: u = DF uhat / J
        const double puxx = px * m.x1 * Ji + py * m.y1 * Ji; // d(pen terms)/d uhat_x
        const double puyy = px * m.x2 * Ji + py * m.y2 * Ji;
        ax.for_active([&](long f, double N, double Nx, double Ny, double, double, double) {
            add(row, UX, f, -Ji * (djc21_1 * N + jc21 * Nx - djc11_2 * N - jc11 * Ny) + puxx * N);
        });
        ay.for_active([&](long f, double N, double Nx, double Ny, double, double, double) {
            add(row, UY, f, -Ji * (djc22_1 * N + jc22 * Nx - djc12_2 * N - jc12 * Ny) + puyy * N);
        });
    }
};

} // namespace

AssemblyResult assemble_mapped_vvp_stokes(const MappedStokesCase& c, const DiscreteSolution2D& sol,
                                          bool want_jacobian) {
    return assemble_mapped_vvp_stokes(c, build_mapped_dof_map(c), sol, want_jacobian);
}

AssemblyResult assemble_mapped_vvp_stokes(const MappedStokesCase& c, const DofMap& dm,
                                          const DiscreteSolution2D& sol, bool want_jacobian) {
    validate_case(c);
    MappedAssembler asmb(c, dm, sol, want_jacobian);
    asmb.run();
    AssemblyResult out;
    out.residual = std::move(asmb.r);
    if (want_jacobian) {
        out.jacobian.resize(dm.num_equations(), dm.num_unknowns());
        out.jacobian.setFromTriplets(asmb.trips.begin(), asmb.trips.end());
    }
    return out;
}

DiscreteSolution2D zero_solution(const MappedStokesCase& c, const DofMap& dm) {
    return solution_from_vector(c, dm, Eigen::VectorXd::Zero(dm.num_unknowns()));
}

DiscreteSolution2D solution_from_vector(const MappedStokesCase&, const DofMap& dm,
                                        const Eigen::VectorXd& x) {
    DiscreteSolution2D s;
    unpack_solution(dm, x, {&s.ux, &s.uy, &s.p, &s.w}, s.lambda);
    return s;
}

Eigen::VectorXd vector_from_solution(const MappedStokesCase&, const DofMap& dm,
                                     const DiscreteSolution2D& sol) {
    return pack_solution(dm, {&sol.ux, &sol.uy, &sol.p, &sol.w}, sol.lambda);
}

CouetteCase couette_case(double r_in, double r_out, double U, int kprime, int mesh) {
    if (!(0.0 < r_in && r_in < r_out))
        throw InvalidInput("couette_case needs 0 < r_in < r_out");
    const double delta = r_in / r_out;
    const double omega_in = U / r_in;
    const double A = -omega_in * delta * delta / (1.0 - delta * delta);
    const double B = omega_in * r_in * r_in / (1.0 - delta * delta);

    CouetteCase cc;
    cc.A = A;
    cc.B = B;
    cc.vorticity_exact = 2.0 * A;
    // counter-clockwise swirl u = u_theta(r) (-y/r, x/r), u_theta = A r + B/r
    cc.velocity = [A, B](double x, double y) {
        const double r2 = x * x + y * y;
        return std::array<double, 2>{-A * y - B * y / r2, A * x + B * x / r2};
    };
    cc.velocity_grad = [A, B](double x, double y) {
        const double r2 = x * x + y * y;
        const double r4 = r2 * r2;
        return std::array<double, 4>{2 * B * x * y / r4, -A - B / r2 + 2 * B * y * y / r4,
                                     A + B / r2 - 2 * B * x * x / r4, -2 * B * x * y / r4};
    };

    MappedStokesCase& d = cc.def;
    d.map = polar_map(r_in, r_out);
    d.nu = 1.0;
    d.forcing = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    // xi2-min edge = inner wall (Dirichlet), xi2-max = outer wall (Dirichlet),
    // xi1 edges carry the zero pressure-gradient condition
    d.edge_bc = {EdgeBC::PressureNeumann, EdgeBC::PressureNeumann, EdgeBC::Dirichlet,
                 EdgeBC::Dirichlet};
    auto exact = cc.velocity;
    d.edge_dirichlet = {exact, exact, exact, exact};
    d.penalty_constant = default_penalty(kprime);
    std::vector<double> bp(mesh + 1);
    for (int i = 0; i <= mesh; ++i)
        bp[i] = static_cast<double>(i) / mesh;
    d.spaces = build_complex_2d(kprime, bp, bp);
    return cc;
}

MappedStokesCase wavy_cavity_case(double A, double B, double C, int kprime, int mesh) {
    MappedStokesCase d;
    d.map = wavy_map(A, B, C);
    d.nu = 1.0;
    d.forcing = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    d.edge_bc = {EdgeBC::Dirichlet, EdgeBC::Dirichlet, EdgeBC::Dirichlet, EdgeBC::Dirichlet};
    auto zero = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    auto lid = [](double, double) { return std::array<double, 2>{1.0, 0.0}; };
    d.edge_dirichlet = {zero, zero, zero, lid};
    d.penalty_constant = default_penalty(kprime);
    std::vector<double> bp(mesh + 1);
    for (int i = 0; i <= mesh; ++i)
        bp[i] = static_cast<double>(i) / mesh;
    d.spaces = build_complex_2d(kprime, bp, bp);
    return d;
}

} // namespace divcol
