#include "divcol/colloc2d.hpp"

#include "divcol/errors.hpp"
#include "divcol/quadrature.hpp"
#include "field_eval.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace divcol {

namespace {

enum Field2D { UX = 0, UY = 1, PRES = 2, OMEGA = 3 };

void validate_case(const CaseDefinition2D& c) {
    if (c.nu <= 0.0)
        throw InvalidInput("viscosity must be positive");
    if (c.formulation == Formulation::VP && c.spaces.kprime < 2)
        throw UnsupportedDegree("VP momentum rows need second derivatives: k' >= 2 required");
    if (c.spaces.kprime < 1)
        throw UnsupportedDegree("k' >= 1 required");
}

double penalty_of(const CaseDefinition2D& c) {
    return c.penalty_constant > 0.0 ? c.penalty_constant : default_penalty(c.spaces.kprime);
}

// Fix the coefficient layer of velocity component `comp` on its normal faces
// to the 1D Greville interpolant of g.e_comp along the face.
void fix_normal_traces(const CaseDefinition2D& c, int comp, DofMap::FieldDofs& fd) {
    const TensorSpace& sp = comp == UX ? c.spaces.vel_x : c.spaces.vel_y;
    const int t = 1 - comp; // tangential direction
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
        throw AssemblyError("singular 1D trace interpolation system");

    for (int side = 0; side < 2; ++side) {
        const double face = side == 0 ? sp.kv[comp].domain_begin() : sp.kv[comp].domain_end();
        Eigen::VectorXd rhs(nt);
        for (int a = 0; a < nt; ++a) {
            const double x = comp == UX ? face : pts[a];
            const double y = comp == UX ? pts[a] : face;
            rhs[a] = c.dirichlet(x, y)[comp];
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

// Counter-clockwise unit tangent of the unit square boundary.
std::array<double, 2> ccw_tangent(int dir, int side) {
    if (dir == 1 && side == 0)
        return {1.0, 0.0}; // bottom
    if (dir == 0 && side == 1)
        return {0.0, 1.0}; // right
    if (dir == 1 && side == 1)
        return {-1.0, 0.0}; // top
    return {0.0, -1.0}; // left
}

} // namespace

double default_penalty(int kprime) { return 5.0 * (kprime + 1); }

DofMap build_dof_map(const CaseDefinition2D& c) {
    validate_case(c);
    const bool vvp = c.formulation == Formulation::VVP;

    DofMap dm;
    dm.gauge = c.gauge;
    dm.pressure_field = PRES;
    dm.fields.resize(vvp ? 4 : 3);

    const TensorSpace* sps[4] = {&c.spaces.vel_x, &c.spaces.vel_y, &c.spaces.pres, &c.spaces.psi};
    for (std::size_t f = 0; f < dm.fields.size(); ++f) {
        dm.fields[f].global.assign(sps[f]->dim(), 0);
        dm.fields[f].fixed.assign(sps[f]->dim(), 0.0);
    }

    fix_normal_traces(c, UX, dm.fields[UX]);
    fix_normal_traces(c, UY, dm.fields[UY]);
    if (c.gauge == GaugeMode::PinFirstDof)
        dm.fields[PRES].global[0] = -1; // pinned to zero

    int next = 0;
    for (auto& fd : dm.fields) {
        for (auto& g : fd.global)
            if (g >= 0)
                g = next++;
        fd.num_free = 0;
        for (int g : fd.global)
            if (g >= 0)
                ++fd.num_free;
    }
    dm.num_free = next;

    // momentum equations: velocity-component grids minus no-penetration faces
    for (int comp = 0; comp < 2; ++comp) {
        const TensorSpace& sp = *sps[comp];
        const auto [h_lo_x, h_hi_x] = detail::wall_greville_gaps(sp.kv[0]);
        const auto [h_lo_y, h_hi_y] = detail::wall_greville_gaps(sp.kv[1]);
        const double gaps[2][2] = {{h_lo_x, h_hi_x}, {h_lo_y, h_hi_y}};
        for (const GrevillePoint& g : greville_grid(sp)) {
            if (g.on_face(comp, 0) || g.on_face(comp, 1))
                continue; // removed: coefficient fixed by the normal BC
            CollocEq eq;
            eq.kind = comp == UX ? EqKind::MomentumX : EqKind::MomentumY;
            eq.x = g.x;
            eq.idx = g.idx;
            if (!vvp) {
                for (int dir = 0; dir < 2; ++dir)
                    for (int side = 0; side < 2; ++side)
                        if (g.on_face(dir, side))
                            eq.faces[eq.num_faces++] = {dir, side, gaps[dir][side],
                                                        PenaltyKind::VelocityComponent};
            }
            dm.equations.push_back(eq);
        }
    }

    // continuity at all pressure Greville points
    {
        bool first = true;
        for (const GrevillePoint& g : greville_grid(c.spaces.pres)) {
            if (first && c.gauge == GaugeMode::PinFirstDof) {
                first = false;
                continue; // row traded for the pinned coefficient
            }
            first = false;
            CollocEq eq;
            eq.kind = EqKind::Continuity;
            eq.x = g.x;
            eq.idx = g.idx;
            dm.equations.push_back(eq);
        }
    }

    // constitutive at all psi Greville points, boundary rows tagged
    if (vvp) {
        const TensorSpace& sp = c.spaces.psi;
        const auto [h_lo_x, h_hi_x] = detail::wall_greville_gaps(sp.kv[0]);
        const auto [h_lo_y, h_hi_y] = detail::wall_greville_gaps(sp.kv[1]);
        const double gaps[2][2] = {{h_lo_x, h_hi_x}, {h_lo_y, h_hi_y}};
        for (const GrevillePoint& g : greville_grid(sp)) {
            CollocEq eq;
            eq.kind = EqKind::ConstitutiveX;
            eq.x = g.x;
            eq.idx = g.idx;
            for (int dir = 0; dir < 2; ++dir)
                for (int side = 0; side < 2; ++side)
                    if (g.on_face(dir, side))
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
        throw AssemblyError("collocation system is not square: " +
                            std::to_string(dm.num_equations()) + " equations vs " +
                            std::to_string(dm.num_unknowns()) + " unknowns");
    return dm;
}

namespace {

struct Assembler2D {
    const CaseDefinition2D& c;
    const DofMap& dm;
    const DiscreteSolution2D& sol;
    bool want_jac;
    Eigen::VectorXd r;
    std::vector<Eigen::Triplet<double>> trips;

    Assembler2D(const CaseDefinition2D& c_, const DofMap& dm_, const DiscreteSolution2D& s_,
                bool wj)
        : c(c_), dm(dm_), sol(s_), want_jac(wj) {
        r = Eigen::VectorXd::Zero(dm.num_equations());
        if (want_jac)
            trips.reserve(static_cast<std::size_t>(dm.num_equations()) *
                          (c.spaces.kprime + 2) * (c.spaces.kprime + 2) * 3);
    }

    void add(int row, const DofMap::FieldDofs& fd, long flat, double value) {
        const int col = fd.global[flat];
        if (col >= 0)
            trips.emplace_back(row, col, value);
    }

    void run() {
        const bool vvp = c.formulation == Formulation::VVP;
        const double cpen = penalty_of(c);
        detail::Active2D ax, ay, aw;

        for (std::size_t row = 0; row < dm.equations.size(); ++row) {
            const CollocEq& eq = dm.equations[row];
            const double x = eq.x[0], y = eq.x[1];
            switch (eq.kind) {
            case EqKind::MomentumX:
            case EqKind::MomentumY: {
                if (vvp)
                    momentum_vvp(static_cast<int>(row), eq, cpen);
                else
                    momentum_vp(static_cast<int>(row), eq, cpen);
                break;
            }
            case EqKind::Continuity: {
                ax.init(c.spaces.vel_x, x, y, 1);
                ay.init(c.spaces.vel_y, x, y, 1);
                const auto vx = ax.field(sol.ux);
                const auto vy = ay.field(sol.uy);
                double res = vx.dx + vy.dy;
                if (dm.gauge == GaugeMode::ZeroMean)
                    res += sol.lambda;
                r[row] = res;
                if (want_jac) {
                    ax.for_active([&](long f, double, double Nx, double, double, double, double) {
                        add(static_cast<int>(row), dm.fields[UX], f, Nx);
                    });
                    ay.for_active([&](long f, double, double, double Ny, double, double, double) {
                        add(static_cast<int>(row), dm.fields[UY], f, Ny);
                    });
                    if (dm.gauge == GaugeMode::ZeroMean)
                        trips.emplace_back(static_cast<int>(row), dm.num_free, 1.0);
                }
                break;
            }
            case EqKind::ConstitutiveX: {
                ax.init(c.spaces.vel_x, x, y, 1);
                ay.init(c.spaces.vel_y, x, y, 1);
                aw.init(c.spaces.psi, x, y, 0);
                const auto vx = ax.field(sol.ux);
                const auto vy = ay.field(sol.uy);
                const auto vw = aw.field(sol.w);
                double res = vw.v - (vy.dx - vx.dy);
                double sx = 0.0, sy = 0.0; // accumulated penalty-weighted tangent
                for (int fident = 0; fident < eq.num_faces; ++fident) {
                    const PenaltyFace& pf = eq.faces[fident];
                    const auto s = ccw_tangent(pf.dir, pf.side);
                    const double pen = cpen / pf.h;
                    const auto g = c.dirichlet(x, y);
                    res += pen * ((vx.v - g[0]) * s[0] + (vy.v - g[1]) * s[1]);
                    sx += pen * s[0];
                    sy += pen * s[1];
                }
                r[row] = res;
                if (want_jac) {
                    aw.for_active([&](long f, double N, double, double, double, double, double) {
                        add(static_cast<int>(row), dm.fields[OMEGA], f, N);
                    });
                    ax.for_active([&](long f, double N, double, double Ny, double, double, double) {
                        add(static_cast<int>(row), dm.fields[UX], f, Ny + sx * N);
                    });
                    ay.for_active([&](long f, double N, double Nx, double, double, double, double) {
                        add(static_cast<int>(row), dm.fields[UY], f, -Nx + sy * N);
                    });
                }
                break;
            }
            default:
                throw AssemblyError("unexpected equation kind in 2D assembly");
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
                    add(row, dm.fields[PRES], static_cast<long>(i), dm.gauge_weights[i]);
        }
    }

    void momentum_vp(int row, const CollocEq& eq, double cpen) {
        const double x = eq.x[0], y = eq.x[1];
        const int comp = eq.kind == EqKind::MomentumX ? UX : UY;
        detail::Active2D aown, aother, ap;
        aown.init(comp == UX ? c.spaces.vel_x : c.spaces.vel_y, x, y, 2);
        aother.init(comp == UX ? c.spaces.vel_y : c.spaces.vel_x, x, y, 0);
        ap.init(c.spaces.pres, x, y, 1);
        const auto vown = aown.field(comp == UX ? sol.ux : sol.uy);
        const auto vother = aother.field(comp == UX ? sol.uy : sol.ux);
        const auto vp = ap.field(sol.p);
        const double uxv = comp == UX ? vown.v : vother.v;
        const double uyv = comp == UX ? vother.v : vown.v;

        double res = -c.nu * (vown.dxx + vown.dyy) + (comp == UX ? vp.dx : vp.dy);
        if (!c.stokes_only)
            res += uxv * vown.dx + uyv * vown.dy;

        double pen_sum = 0.0;
        if (eq.num_faces > 0) {
            const auto g = c.dirichlet(x, y);
            for (int i = 0; i < eq.num_faces; ++i) {
                const double pen = cpen * cpen / (eq.faces[i].h * eq.faces[i].h);
                res += pen * (vown.v - g[comp]);
                pen_sum += pen;
            }
        }
        const auto f = c.forcing(x, y);
        res -= f[comp];
        r[row] = res;

        if (!want_jac)
            return;
        aown.for_active([&](long fl, double N, double Nx, double Ny, double Nxx, double Nyy,
                            double) {
            double j = -c.nu * (Nxx + Nyy) + pen_sum * N;
            if (!c.stokes_only) {
                j += uxv * Nx + uyv * Ny; // u . grad(dN)
                j += (comp == UX ? vown.dx : vown.dy) * N; // dN in the own slot of u . grad u
            }
            add(row, dm.fields[comp], fl, j);
        });
        if (!c.stokes_only)
            aother.for_active([&](long fl, double N, double, double, double, double, double) {
                add(row, dm.fields[comp == UX ? UY : UX], fl,
                    (comp == UX ? vown.dy : vown.dx) * N);
            });
        ap.for_active([&](long fl, double, double Nx, double Ny, double, double, double) {
            add(row, dm.fields[PRES], fl, comp == UX ? Nx : Ny);
        });
    }

    void momentum_vvp(int row, const CollocEq& eq, double /*cpen*/) {
        const double x = eq.x[0], y = eq.x[1];
        const int comp = eq.kind == EqKind::MomentumX ? UX : UY;
        detail::Active2D aw, ap, avel;
        aw.init(c.spaces.psi, x, y, 1);
        ap.init(c.spaces.pres, x, y, 1);
        const auto vw = aw.field(sol.w);
        const auto vp = ap.field(sol.p);

        double res;
        double velv = 0.0;
        if (comp == UX) {
            res = c.nu * vw.dy + vp.dx;
            if (!c.stokes_only) {
                avel.init(c.spaces.vel_y, x, y, 0);
                velv = avel.field(sol.uy).v;
                res -= vw.v * velv;
            }
        } else {
            res = -c.nu * vw.dx + vp.dy;
            if (!c.stokes_only) {
                avel.init(c.spaces.vel_x, x, y, 0);
                velv = avel.field(sol.ux).v;
                res += vw.v * velv;
            }
        }
        const auto f = c.forcing(x, y);
        res -= f[comp];
        r[row] = res;

        if (!want_jac)
            return;
        const double sign = comp == UX ? -1.0 : 1.0;
        aw.for_active([&](long fl, double N, double Nx, double Ny, double, double, double) {
            double j = comp == UX ? c.nu * Ny : -c.nu * Nx;
            if (!c.stokes_only)
                j += sign * N * velv;
            add(row, dm.fields[OMEGA], fl, j);
        });
        if (!c.stokes_only)
            avel.for_active([&](long fl, double N, double, double, double, double, double) {
                add(row, dm.fields[comp == UX ? UY : UX], fl, sign * vw.v * N);
            });
        ap.for_active([&](long fl, double, double Nx, double Ny, double, double, double) {
            add(row, dm.fields[PRES], fl, comp == UX ? Nx : Ny);
        });
    }
};

} // namespace

AssemblyResult assemble_vp(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                           bool want_jacobian) {
    if (c.formulation != Formulation::VP)
        throw InvalidInput("assemble_vp called on a non-VP case");
    return assemble_2d(c, sol, want_jacobian);
}

AssemblyResult assemble_vvp(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                            bool want_jacobian) {
    if (c.formulation != Formulation::VVP)
        throw InvalidInput("assemble_vvp called on a non-VVP case");
    return assemble_2d(c, sol, want_jacobian);
}

AssemblyResult assemble_2d(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                           bool want_jacobian) {
    return assemble_2d(c, build_dof_map(c), sol, want_jacobian);
}

AssemblyResult assemble_2d(const CaseDefinition2D& c, const DofMap& dm,
                           const DiscreteSolution2D& sol, bool want_jacobian) {
    validate_case(c);
    Assembler2D asmb(c, dm, sol, want_jacobian);
    asmb.run();
    AssemblyResult out;
    out.residual = std::move(asmb.r);
    if (want_jacobian) {
        out.jacobian.resize(dm.num_equations(), dm.num_unknowns());
        out.jacobian.setFromTriplets(asmb.trips.begin(), asmb.trips.end());
    }
    return out;
}

DiscreteSolution2D zero_solution(const CaseDefinition2D& c, const DofMap& dm) {
    return solution_from_vector(c, dm, Eigen::VectorXd::Zero(dm.num_unknowns()));
}

DiscreteSolution2D solution_from_vector(const CaseDefinition2D& c, const DofMap& dm,
                                        const Eigen::VectorXd& x) {
    DiscreteSolution2D s;
    std::vector<std::vector<double>*> fields = {&s.ux, &s.uy, &s.p};
    if (c.formulation == Formulation::VVP)
        fields.push_back(&s.w);
    unpack_solution(dm, x, fields, s.lambda);
    return s;
}

Eigen::VectorXd vector_from_solution(const CaseDefinition2D& c, const DofMap& dm,
                                     const DiscreteSolution2D& sol) {
    std::vector<const std::vector<double>*> fields = {&sol.ux, &sol.uy, &sol.p};
    if (c.formulation == Formulation::VVP)
        fields.push_back(&sol.w);
    return pack_solution(dm, fields, sol.lambda);
}

double divergence_max(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol,
                      int n_samples) {
    double dmax = 0.0;
    for (int i = 1; i <= n_samples; ++i) {
        const auto p = halton_point(static_cast<std::uint64_t>(i), 2);
        const FieldSample fx = eval_field(spaces.vel_x, sol.ux, std::span(p.data(), 2), 1);
        const FieldSample fy = eval_field(spaces.vel_y, sol.uy, std::span(p.data(), 2), 1);
        dmax = std::max(dmax, std::abs(fx.gradient[0] + fy.gradient[1]));
    }
    return dmax;
}

} // namespace divcol
