#pragma once

#include "divcol/colloc2d.hpp"
#include "divcol/dofmap.hpp"

#include <array>
#include <functional>
#include <string>

namespace divcol {

/// All geometry-map data at one parametric point: position, first and second
/// partials of each physical coordinate. Derived quantities (Jacobian,
/// metric C = DF^T DF and their parametric derivatives) come from these.
struct MapJet {
    double x = 0, y = 0;
    double x1 = 1, x2 = 0, y1 = 0, y2 = 1;             // dF
    double x11 = 0, x12 = 0, x22 = 0;                   // second partials of x
    double y11 = 0, y12 = 0, y22 = 0;

    double jac() const { return x1 * y2 - x2 * y1; }
    std::array<double, 2> djac() const {
        return {x11 * y2 + x1 * y12 - x12 * y1 - x2 * y11,
                x12 * y2 + x1 * y22 - x22 * y1 - x2 * y12};
    }
    double c11() const { return x1 * x1 + y1 * y1; }
    double c12() const { return x1 * x2 + y1 * y2; }
    double c22() const { return x2 * x2 + y2 * y2; }
    // d C_ab / d xi_d
    double dc11(int d) const {
        return 2 * (x1 * (d == 0 ? x11 : x12) + y1 * (d == 0 ? y11 : y12));
    }
    double dc12(int d) const {
        const double x1d = d == 0 ? x11 : x12, x2d = d == 0 ? x12 : x22;
        const double y1d = d == 0 ? y11 : y12, y2d = d == 0 ? y12 : y22;
        return x1d * x2 + x1 * x2d + y1d * y2 + y1 * y2d;
    }
    double dc22(int d) const {
        return 2 * (x2 * (d == 0 ? x12 : x22) + y2 * (d == 0 ? y12 : y22));
    }
};

struct GeometryMap2D {
    std::string name;
    std::function<MapJet(double, double)> jet;
};

GeometryMap2D identity_map();

/// F = (R sin(2 pi xi1), R cos(2 pi xi1)), R = (r_out - r_in) xi2 + r_in.
GeometryMap2D polar_map(double r_in, double r_out);

/// F = (xi1, A(B(1 - xi2) sin(C pi xi1) + xi2)); throws InvalidGeometry when
/// the sampled Jacobian is not positive.
GeometryMap2D wavy_map(double A, double B, double C);

/// Structure-preserving transforms at a point: velocity by the Piola map
/// v_hat = J DF^{-1} v, pressure by q_hat = J q, vorticity by composition.
std::array<double, 2> pullback_velocity(const MapJet& m, const std::array<double, 2>& v);
std::array<double, 2> pushforward_velocity(const MapJet& m, const std::array<double, 2>& vhat);
double pullback_pressure(const MapJet& m, double q);
double pushforward_pressure(const MapJet& m, double qhat);

enum class EdgeBC {
    Dirichlet,       // normal strong + tangential via constitutive-row penalty
    PressureNeumann, // no velocity data; dp/dn = 0 via momentum-row penalty
};

/// Parametric edges indexed 2*dir + side: 0 = xi1-min, 1 = xi1-max,
/// 2 = xi2-min, 3 = xi2-max.
struct MappedStokesCase {
    GeometryMap2D map;
    double nu = 1.0;
    std::function<std::array<double, 2>(double, double)> forcing; // physical f(x, y)
    std::array<EdgeBC, 4> edge_bc{EdgeBC::Dirichlet, EdgeBC::Dirichlet, EdgeBC::Dirichlet,
                                  EdgeBC::Dirichlet};
    std::array<std::function<std::array<double, 2>(double, double)>, 4>
        edge_dirichlet; // physical g per edge, used on Dirichlet edges
    double penalty_constant = 0.0;
    ComplexSpaces2D spaces;
    GaugeMode gauge = GaugeMode::ZeroMean;
};

DofMap build_mapped_dof_map(const MappedStokesCase& c);

AssemblyResult assemble_mapped_vvp_stokes(const MappedStokesCase& c, const DiscreteSolution2D& sol,
                                          bool want_jacobian);
AssemblyResult assemble_mapped_vvp_stokes(const MappedStokesCase& c, const DofMap& dm,
                                          const DiscreteSolution2D& sol, bool want_jacobian);

DiscreteSolution2D zero_solution(const MappedStokesCase& c, const DofMap& dm);
DiscreteSolution2D solution_from_vector(const MappedStokesCase& c, const DofMap& dm,
                                        const Eigen::VectorXd& x);
Eigen::VectorXd vector_from_solution(const MappedStokesCase& c, const DofMap& dm,
                                     const DiscreteSolution2D& sol);

/// Cylindrical Couette flow on the annulus r_in < r < r_out, inner wall
/// rotating with tangential speed U. Exact swirl u_theta = A r + B/r,
/// constant vorticity 2A, zero pressure.
struct CouetteCase {
    MappedStokesCase def;
    double A = 0, B = 0;
    double vorticity_exact = 0; // 2A
    std::function<std::array<double, 2>(double, double)> velocity;
    std::function<std::array<double, 4>(double, double)> velocity_grad;
};

CouetteCase couette_case(double r_in, double r_out, double U, int kprime = 2, int mesh = 4);

/// Stokes lid-driven cavity over a wavy bottom wall (unit lid speed).
MappedStokesCase wavy_cavity_case(double A, double B, double C, int kprime, int mesh);

} // namespace divcol
