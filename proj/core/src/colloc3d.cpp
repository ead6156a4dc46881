#include "divcol/colloc3d.hpp"

#include "divcol/errors.hpp"
#include "divcol/quadrature.hpp"
#include "field_eval.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace divcol {

namespace {

enum Field3D { UX = 0, UY = 1, UZ = 2, PRES = 3, WX = 4, WY = 5, WZ = 6 };

void validate_case(const CaseDefinition3D& c) {
    if (c.nu <= 0.0)
        throw InvalidInput("viscosity must be positive");
    if (c.formulation == Formulation::VP && c.spaces.kprime < 2)
        throw UnsupportedDegree("VP momentum rows need second derivatives: k' >= 2 required");
    if (c.spaces.kprime < 1)
        throw UnsupportedDegree("k' >= 1 required");
}

double penalty_of(const CaseDefinition3D& c) {
    return c.penalty_constant > 0.0 ? c.penalty_constant : default_penalty(c.spaces.kprime);
}

// Fix component comp on its two normal faces to the tensor-product Greville
// interpolant of g.e_comp over the face.
void fix_normal_traces(const CaseDefinition3D& c, int comp, DofMap::FieldDofs& fd) {
    const TensorSpace& sp = c.spaces.vel[comp];
    const int t1 = comp == 0 ? 1 : 0;
    const int t2 = comp == 2 ? 1 : 2;
    const std::vector<double> p1 = greville_abscissae(sp.kv[t1]);
    const std::vector<double> p2 = greville_abscissae(sp.kv[t2]);
    const int n1 = sp.kv[t1].count();
    const int n2 = sp.kv[t2].count();
    const int nc = sp.kv[comp].count();

    auto colloc_matrix = [](const KnotVector& kv, const std::vector<double>& pts) {
        const int n = kv.count();
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
        BasisEval be;
        for (int a = 0; a < n; ++a) {
            eval_basis(kv, pts[a], 0, be);
            const int off = be.first_basis(kv.degree);
            for (int j = 0; j <= kv.degree; ++j)
                B(a, off + j) = be.values[j];
        }
        return B;
    };
    Eigen::FullPivLU<Eigen::MatrixXd> lu1(colloc_matrix(sp.kv[t1], p1));
    Eigen::FullPivLU<Eigen::MatrixXd> lu2(colloc_matrix(sp.kv[t2], p2));
    if (!lu1.isInvertible() || !lu2.isInvertible())
        throw AssemblyError("singular face trace interpolation system");

    for (int side = 0; side < 2; ++side) {
        const double face = side == 0 ? sp.kv[comp].domain_begin() : sp.kv[comp].domain_end();
        Eigen::MatrixXd G(n1, n2);
        for (int b = 0; b < n2; ++b)
            for (int a = 0; a < n1; ++a) {
                std::array<double, 3> x{};
                x[comp] = face;
                x[t1] = p1[a];
                x[t2] = p2[b];
                G(a, b) = c.dirichlet(x[0], x[1], x[2])[comp];
            }
        const Eigen::MatrixXd C1 = lu1.solve(G);                      // along t1
        const Eigen::MatrixXd C = lu2.solve(C1.transpose()).transpose(); // along t2
        const int layer = side == 0 ? 0 : nc - 1;
        for (int b = 0; b < n2; ++b)
            for (int a = 0; a < n1; ++a) {
                std::array<int, 3> midx{};
                midx[comp] = layer;
                midx[t1] = a;
                midx[t2] = b;
                const long flat = midx[0] + static_cast<long>(sp.count(0)) *
                                                (midx[1] + static_cast<long>(sp.count(1)) * midx[2]);
                fd.global[flat] = -1;
                fd.fixed[flat] = C(a, b);
            }
    }
}

struct FaceGaps {
    double g[3][2]; // [dir][side]
};

FaceGaps face_gaps(const TensorSpace& sp) {
    FaceGaps fg{};
    for (int d = 0; d < 3; ++d) {
        const auto [lo, hi] = detail::wall_greville_gaps(sp.kv[d]);
        fg.g[d][0] = lo;
        fg.g[d][1] = hi;
    }
    return fg;
}

} // namespace

DofMap build_dof_map_3d(const CaseDefinition3D& c) {
    validate_case(c);
    const bool vvp = c.formulation == Formulation::VVP;

    DofMap dm;
    dm.gauge = c.gauge;
    dm.pressure_field = PRES;
    dm.fields.resize(vvp ? 7 : 4);

    const TensorSpace* sps[7] = {&c.spaces.vel[0], &c.spaces.vel[1], &c.spaces.vel[2],
                                 &c.spaces.pres,   &c.spaces.omega[0], &c.spaces.omega[1],
                                 &c.spaces.omega[2]};
    for (std::size_t f = 0; f < dm.fields.size(); ++f) {
        dm.fields[f].global.assign(sps[f]->dim(), 0);
        dm.fields[f].fixed.assign(sps[f]->dim(), 0.0);
    }

    for (int comp = 0; comp < 3; ++comp)
        fix_normal_traces(c, comp, dm.fields[comp]);
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

    static constexpr EqKind mom_kind[3] = {EqKind::MomentumX, EqKind::MomentumY, EqKind::MomentumZ};
    for (int comp = 0; comp < 3; ++comp) {
        const TensorSpace& sp = *sps[comp];
        const FaceGaps fg = face_gaps(sp);
        for (const GrevillePoint& g : greville_grid(sp)) {
            if (g.on_face(comp, 0) || g.on_face(comp, 1))
                continue;
            CollocEq eq;
            eq.kind = mom_kind[comp];
            eq.x = g.x;
            eq.idx = g.idx;
            if (!vvp) {
                for (int dir = 0; dir < 3; ++dir)
                    for (int side = 0; side < 2; ++side)
                        if (g.on_face(dir, side))
                            eq.faces[eq.num_faces++] = {dir, side, fg.g[dir][side],
                                                        PenaltyKind::VelocityComponent};
            }
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

    if (vvp) {
        static constexpr EqKind const_kind[3] = {EqKind::ConstitutiveX, EqKind::ConstitutiveY,
                                                 EqKind::ConstitutiveZ};
        for (int comp = 0; comp < 3; ++comp) {
            const TensorSpace& sp = c.spaces.omega[comp];
            const FaceGaps fg = face_gaps(sp);
            for (const GrevillePoint& g : greville_grid(sp)) {
                CollocEq eq;
                eq.kind = const_kind[comp];
                eq.x = g.x;
                eq.idx = g.idx;
                for (int dir = 0; dir < 3; ++dir)
                    for (int side = 0; side < 2; ++side)
                        if (g.on_face(dir, side))
                            eq.faces[eq.num_faces++] = {dir, side, fg.g[dir][side],
                                                        PenaltyKind::TangentialVelocity};
                dm.equations.push_back(eq);
            }
        }
    }

    if (c.gauge == GaugeMode::ZeroMean) {
        const std::vector<double> w0 = basis_integrals(c.spaces.pres.kv[0]);
        const std::vector<double> w1 = basis_integrals(c.spaces.pres.kv[1]);
        const std::vector<double> w2 = basis_integrals(c.spaces.pres.kv[2]);
        dm.gauge_weights.resize(c.spaces.pres.dim());
        long f = 0;
        for (std::size_t k = 0; k < w2.size(); ++k)
            for (std::size_t j = 0; j < w1.size(); ++j)
                for (std::size_t i = 0; i < w0.size(); ++i)
                    dm.gauge_weights[f++] = w0[i] * w1[j] * w2[k];
    }

    if (dm.num_equations() != dm.num_unknowns())
        throw AssemblyError("3D collocation system is not square: " +
                            std::to_string(dm.num_equations()) + " equations vs " +
                            std::to_string(dm.num_unknowns()) + " unknowns");
    return dm;
}

namespace {

struct Assembler3D {
    const CaseDefinition3D& c;
    const DofMap& dm;
    const DiscreteSolution3D& sol;
    bool want_jac;
    Eigen::VectorXd r;
    std::vector<Eigen::Triplet<double>> trips;

    Assembler3D(const CaseDefinition3D& c_, const DofMap& dm_, const DiscreteSolution3D& s_,
                bool wj)
        : c(c_), dm(dm_), sol(s_), want_jac(wj) {
        r = Eigen::VectorXd::Zero(dm.num_equations());
        if (want_jac) {
            const long per = static_cast<long>(std::pow(c.spaces.kprime + 2, 3));
            trips.reserve(static_cast<std::size_t>(dm.num_equations()) * per * 3);
        }
    }

    void add(int row, int field, long flat, double value) {
        const int col = dm.fields[field].global[flat];
        if (col >= 0)
            trips.emplace_back(row, col, value);
    }

    const std::vector<double>& coeffs_of(int field) const {
        switch (field) {
        case UX: return sol.ux;
        case UY: return sol.uy;
        case UZ: return sol.uz;
        case PRES: return sol.p;
        case WX: return sol.wx;
        case WY: return sol.wy;
        default: return sol.wz;
        }
    }

    const TensorSpace& space_of(int field) const {
        switch (field) {
        case UX: return c.spaces.vel[0];
        case UY: return c.spaces.vel[1];
        case UZ: return c.spaces.vel[2];
        case PRES: return c.spaces.pres;
        case WX: return c.spaces.omega[0];
        case WY: return c.spaces.omega[1];
        default: return c.spaces.omega[2];
        }
    }

    void run() {
        const bool vvp = c.formulation == Formulation::VVP;
        for (std::size_t row = 0; row < dm.equations.size(); ++row) {
            const CollocEq& eq = dm.equations[row];
            switch (eq.kind) {
            case EqKind::MomentumX:
            case EqKind::MomentumY:
            case EqKind::MomentumZ:
                if (vvp)
                    momentum_vvp(static_cast<int>(row), eq);
                else
                    momentum_vp(static_cast<int>(row), eq);
                break;
            case EqKind::Continuity:
                continuity(static_cast<int>(row), eq);
                break;
            case EqKind::ConstitutiveX:
            case EqKind::ConstitutiveY:
            case EqKind::ConstitutiveZ:
                constitutive(static_cast<int>(row), eq);
                break;
            default:
                throw AssemblyError("unexpected equation kind in 3D assembly");
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

    void continuity(int row, const CollocEq& eq) {
        detail::Active3D a[3];
        double res = dm.gauge == GaugeMode::ZeroMean ? sol.lambda : 0.0;
        for (int comp = 0; comp < 3; ++comp) {
            a[comp].init(c.spaces.vel[comp], eq.x[0], eq.x[1], eq.x[2], 1);
            const auto v = a[comp].field(coeffs_of(comp));
            res += comp == 0 ? v.dx : comp == 1 ? v.dy : v.dz;
        }
        r[row] = res;
        if (!want_jac)
            return;
        for (int comp = 0; comp < 3; ++comp)
            a[comp].for_active([&](long f, double, double Nx, double Ny, double Nz, double, double,
                                   double) {
                add(row, comp, f, comp == 0 ? Nx : comp == 1 ? Ny : Nz);
            });
        if (dm.gauge == GaugeMode::ZeroMean)
            trips.emplace_back(row, dm.num_free, 1.0);
    }

    void momentum_vp(int row, const CollocEq& eq) {
        const int comp = eq.kind == EqKind::MomentumX ? 0 : eq.kind == EqKind::MomentumY ? 1 : 2;
        const double x = eq.x[0], y = eq.x[1], z = eq.x[2];
        detail::Active3D aown, ap;
        aown.init(c.spaces.vel[comp], x, y, z, 2);
        ap.init(c.spaces.pres, x, y, z, 1);
        const auto vown = aown.field(coeffs_of(comp));
        const auto vp = ap.field(sol.p);

        std::array<double, 3> uval{};
        detail::Active3D aother[3];
        if (!c.stokes_only)
            for (int d = 0; d < 3; ++d) {
                if (d == comp) {
                    uval[d] = vown.v;
                    continue;
                }
                aother[d].init(c.spaces.vel[d], x, y, z, 0);
                uval[d] = aother[d].field(coeffs_of(d)).v;
            }

        const double dp = comp == 0 ? vp.dx : comp == 1 ? vp.dy : vp.dz;
        double res = -c.nu * (vown.dxx + vown.dyy + vown.dzz) + dp;
        if (!c.stokes_only)
            res += uval[0] * vown.dx + uval[1] * vown.dy + uval[2] * vown.dz;

        double pen_sum = 0.0;
        if (eq.num_faces > 0) {
            const double cpen = penalty_of(c);
            const auto g = c.dirichlet(x, y, z);
            for (int i = 0; i < eq.num_faces; ++i) {
                const double pen = cpen * cpen / (eq.faces[i].h * eq.faces[i].h);
                res += pen * (vown.v - g[comp]);
                pen_sum += pen;
            }
        }
        const auto f = c.forcing(x, y, z);
        r[row] = res - f[comp];

        if (!want_jac)
            return;
        const double dgrad_own = comp == 0 ? vown.dx : comp == 1 ? vown.dy : vown.dz;
        aown.for_active([&](long fl, double N, double Nx, double Ny, double Nz, double Nxx,
                            double Nyy, double Nzz) {
            double j = -c.nu * (Nxx + Nyy + Nzz) + pen_sum * N;
            if (!c.stokes_only)
                j += uval[0] * Nx + uval[1] * Ny + uval[2] * Nz + dgrad_own * N;
            add(row, comp, fl, j);
        });
        if (!c.stokes_only)
            for (int d = 0; d < 3; ++d) {
                if (d == comp)
                    continue;
                const double dgrad = d == 0 ? vown.dx : d == 1 ? vown.dy : vown.dz;
                aother[d].for_active([&](long fl, double N, double, double, double, double, double,
                                         double) { add(row, d, fl, dgrad * N); });
            }
        ap.for_active([&](long fl, double, double Nx, double Ny, double Nz, double, double,
                          double) { add(row, PRES, fl, comp == 0 ? Nx : comp == 1 ? Ny : Nz); });
    }

    void momentum_vvp(int row, const CollocEq& eq) {
        const int comp = eq.kind == EqKind::MomentumX ? 0 : eq.kind == EqKind::MomentumY ? 1 : 2;
        const double x = eq.x[0], y = eq.x[1], z = eq.x[2];
        // cyclic indices: row comp uses omega[c1], omega[c2] and velocity u[c1], u[c2]
        const int c1 = (comp + 1) % 3;
        const int c2 = (comp + 2) % 3;

        detail::Active3D aw1, aw2, ap;
        aw1.init(c.spaces.omega[c1], x, y, z, 1);
        aw2.init(c.spaces.omega[c2], x, y, z, 1);
        ap.init(c.spaces.pres, x, y, z, 1);
        const auto w1 = aw1.field(coeffs_of(WX + c1));
        const auto w2 = aw2.field(coeffs_of(WX + c2));
        const auto vp = ap.field(sol.p);

        // (curl w)_comp = dw_c2/dx_c1 - dw_c1/dx_c2
        auto dalong = [](const detail::Vals3D& v, int dir) {
            return dir == 0 ? v.dx : dir == 1 ? v.dy : v.dz;
        };
        double res = c.nu * (dalong(w2, c1) - dalong(w1, c2)) +
                     (comp == 0 ? vp.dx : comp == 1 ? vp.dy : vp.dz);

        detail::Active3D au1, au2;
        double u1 = 0.0, u2 = 0.0;
        if (!c.stokes_only) {
            au1.init(c.spaces.vel[c1], x, y, z, 0);
            au2.init(c.spaces.vel[c2], x, y, z, 0);
            u1 = au1.field(coeffs_of(c1)).v;
            u2 = au2.field(coeffs_of(c2)).v;
            // (w x u)_comp = w_c1 u_c2 - w_c2 u_c1
            res += w1.v * u2 - w2.v * u1;
        }
        const auto f = c.forcing(x, y, z);
        r[row] = res - f[comp];

        if (!want_jac)
            return;
        aw2.for_active([&](long fl, double N, double Nx, double Ny, double Nz, double, double,
                           double) {
            const double dN = c1 == 0 ? Nx : c1 == 1 ? Ny : Nz;
            add(row, WX + c2, fl, c.nu * dN - (c.stokes_only ? 0.0 : N * u1));
        });
        aw1.for_active([&](long fl, double N, double Nx, double Ny, double Nz, double, double,
                           double) {
            const double dN = c2 == 0 ? Nx : c2 == 1 ? Ny : Nz;
            add(row, WX + c1, fl, -c.nu * dN + (c.stokes_only ? 0.0 : N * u2));
        });
        if (!c.stokes_only) {
            au2.for_active([&](long fl, double N, double, double, double, double, double, double) {
                add(row, c2, fl, w1.v * N);
            });
            au1.for_active([&](long fl, double N, double, double, double, double, double, double) {
                add(row, c1, fl, -w2.v * N);
            });
        }
        ap.for_active([&](long fl, double, double Nx, double Ny, double Nz, double, double,
                          double) { add(row, PRES, fl, comp == 0 ? Nx : comp == 1 ? Ny : Nz); });
    }

    void constitutive(int row, const CollocEq& eq) {
        const int comp = eq.kind == EqKind::ConstitutiveX ? 0
                         : eq.kind == EqKind::ConstitutiveY ? 1
                                                            : 2;
        const double x = eq.x[0], y = eq.x[1], z = eq.x[2];
        const int c1 = (comp + 1) % 3;
        const int c2 = (comp + 2) % 3;

        detail::Active3D aw, au1, au2;
        aw.init(c.spaces.omega[comp], x, y, z, 0);
        au1.init(c.spaces.vel[c1], x, y, z, 1);
        au2.init(c.spaces.vel[c2], x, y, z, 1);
        const auto w = aw.field(coeffs_of(WX + comp));
        const auto v1 = au1.field(coeffs_of(c1));
        const auto v2 = au2.field(coeffs_of(c2));

        auto dalong = [](const detail::Vals3D& v, int dir) {
            return dir == 0 ? v.dx : dir == 1 ? v.dy : v.dz;
        };
        // (curl u)_comp = du_c2/dx_c1 - du_c1/dx_c2
        double res = w.v - (dalong(v2, c1) - dalong(v1, c2));

        // boundary rows: (C/h) ((u-g) x n)_comp summed over incident faces;
        // entries involve only the c1 and c2 velocity components
        double p1 = 0.0, p2 = 0.0; // multipliers of u_c1 and u_c2
        if (eq.num_faces > 0) {
            const double cpen = penalty_of(c);
            const auto g = c.dirichlet(x, y, z);
            for (int i = 0; i < eq.num_faces; ++i) {
                const PenaltyFace& pf = eq.faces[i];
                std::array<double, 3> n{0.0, 0.0, 0.0};
                n[pf.dir] = pf.side == 0 ? -1.0 : 1.0;
                const double pen = cpen / pf.h;
                // (v x n)_comp = v_c1 n_c2 - v_c2 n_c1
                res += pen * ((v1.v - g[c1]) * n[c2] - (v2.v - g[c2]) * n[c1]);
                p1 += pen * n[c2];
                p2 -= pen * n[c1];
            }
        }
        r[row] = res;

        if (!want_jac)
            return;
        aw.for_active([&](long fl, double N, double, double, double, double, double, double) {
            add(row, WX + comp, fl, N);
        });
        au2.for_active([&](long fl, double N, double Nx, double Ny, double Nz, double, double,
                           double) {
            const double dN = c1 == 0 ? Nx : c1 == 1 ? Ny : Nz;
            add(row, c2, fl, -dN + p2 * N);
        });
        au1.for_active([&](long fl, double N, double Nx, double Ny, double Nz, double, double,
                           double) {
            const double dN = c2 == 0 ? Nx : c2 == 1 ? Ny : Nz;
            add(row, c1, fl, dN + p1 * N);
        });
    }
};

} // namespace

AssemblyResult assemble_vp_3d(const CaseDefinition3D& c, const DiscreteSolution3D& sol,
                              bool want_jacobian) {
    if (c.formulation != Formulation::VP)
        throw InvalidInput("assemble_vp_3d called on a non-VP case");
    return assemble_3d(c, build_dof_map_3d(c), sol, want_jacobian);
}

AssemblyResult assemble_vvp_3d(const CaseDefinition3D& c, const DiscreteSolution3D& sol,
                               bool want_jacobian) {
    if (c.formulation != Formulation::VVP)
        throw InvalidInput("assemble_vvp_3d called on a non-VVP case");
    return assemble_3d(c, build_dof_map_3d(c), sol, want_jacobian);
}

AssemblyResult assemble_3d(const CaseDefinition3D& c, const DofMap& dm,
                           const DiscreteSolution3D& sol, bool want_jacobian) {
    validate_case(c);
    Assembler3D asmb(c, dm, sol, want_jacobian);
    asmb.run();
    AssemblyResult out;
    out.residual = std::move(asmb.r);
    if (want_jacobian) {
        out.jacobian.resize(dm.num_equations(), dm.num_unknowns());
        out.jacobian.setFromTriplets(asmb.trips.begin(), asmb.trips.end());
    }
    return out;
}

DiscreteSolution3D zero_solution(const CaseDefinition3D& c, const DofMap& dm) {
    return solution_from_vector(c, dm, Eigen::VectorXd::Zero(dm.num_unknowns()));
}

DiscreteSolution3D solution_from_vector(const CaseDefinition3D& c, const DofMap& dm,
                                        const Eigen::VectorXd& x) {
    DiscreteSolution3D s;
    std::vector<std::vector<double>*> fields = {&s.ux, &s.uy, &s.uz, &s.p};
    if (c.formulation == Formulation::VVP) {
        fields.push_back(&s.wx);
        fields.push_back(&s.wy);
        fields.push_back(&s.wz);
    }
    unpack_solution(dm, x, fields, s.lambda);
    return s;
}

Eigen::VectorXd vector_from_solution(const CaseDefinition3D& c, const DofMap& dm,
                                     const DiscreteSolution3D& sol) {
    std::vector<const std::vector<double>*> fields = {&sol.ux, &sol.uy, &sol.uz, &sol.p};
    if (c.formulation == Formulation::VVP) {
        fields.push_back(&sol.wx);
        fields.push_back(&sol.wy);
        fields.push_back(&sol.wz);
    }
    return pack_solution(dm, fields, sol.lambda);
}

double divergence_max(const ComplexSpaces3D& spaces, const DiscreteSolution3D& sol,
                      int n_samples) {
    double dmax = 0.0;
    for (int i = 1; i <= n_samples; ++i) {
        const auto p = halton_point(static_cast<std::uint64_t>(i), 3);
        const FieldSample fx = eval_field(spaces.vel[0], sol.ux, p, 1);
        const FieldSample fy = eval_field(spaces.vel[1], sol.uy, p, 1);
        const FieldSample fz = eval_field(spaces.vel[2], sol.uz, p, 1);
        dmax = std::max(dmax, std::abs(fx.gradient[0] + fy.gradient[1] + fz.gradient[2]));
    }
    return dmax;
}

} // namespace divcol
