#pragma once

#include "divcol/colloc2d.hpp"
#include "divcol/colloc3d.hpp"
#include "divcol/mapped.hpp"
#include "divcol/solver.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace divcol {

/// Exact 2D fields with analytic first derivatives. velocity_grad is
/// [dux/dx, dux/dy, duy/dx, duy/dy]; pressure is the kinematic, zero-mean
/// representative.
struct Exact2D {
    std::function<std::array<double, 2>(double, double)> velocity;
    std::function<std::array<double, 4>(double, double)> velocity_grad;
    std::function<double(double, double)> pressure;
    std::function<std::array<double, 2>(double, double)> pressure_grad;
    std::function<double(double, double)> vorticity;
    std::function<std::array<double, 2>(double, double)> vorticity_grad;
};

struct Exact3D {
    std::function<std::array<double, 3>(double, double, double)> velocity;
    std::function<std::array<double, 9>(double, double, double)> velocity_grad; // row-major du_i/dx_j
    std::function<double(double, double, double)> pressure;
    std::function<std::array<double, 3>(double, double, double)> pressure_grad;
    std::function<std::array<double, 3>(double, double, double)> vorticity;
    std::function<std::array<double, 9>(double, double, double)> vorticity_grad;
};

/// Manufactured vortex on the unit square (pressure scaled by sigma) with
/// forcing callbacks for both formulations.
struct ManufacturedCase2D {
    double nu = 1.0;
    double sigma = 1.0;
    Exact2D exact;
    std::function<std::array<double, 2>(double, double)> forcing_vp;
    std::function<std::array<double, 2>(double, double)> forcing_vvp;
};

ManufacturedCase2D vortex_2d(double nu, double sigma = 1.0);

struct ManufacturedCase3D {
    double nu = 1.0;
    Exact3D exact;
    std::function<std::array<double, 3>(double, double, double)> forcing_vp;
    std::function<std::array<double, 3>(double, double, double)> forcing_vvp;
};

ManufacturedCase3D filament_3d(double nu);

struct FieldErrors {
    double l2 = 0.0;
    double h1 = 0.0; // seminorm
};

struct ErrorReport {
    FieldErrors velocity, pressure, vorticity;
    bool has_vorticity = false;
    double mesh_h = 0.0;
    int kprime = 0;
    Formulation formulation = Formulation::VVP;
};

/// Gauss-Legendre error norms with quad_per_span points per direction per knot
/// span (default k'+3). Pressure errors compare mean-aligned representatives.
/// When pressure_is_total the kinematic pressure P - |u|^2/2 is compared.
/// With a geometry map fields are pushed forward and weighted by |J|.
ErrorReport error_norms_2d(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol,
                           Formulation formulation, bool pressure_is_total, const Exact2D& exact,
                           const GeometryMap2D* map = nullptr, int quad_per_span = 0);

ErrorReport error_norms_3d(const ComplexSpaces3D& spaces, const DiscreteSolution3D& sol,
                           Formulation formulation, bool pressure_is_total, const Exact3D& exact,
                           int quad_per_span = 0);

/// Last-interval convergence rates log2(e_h / e_{h/2}); a rate is absent when
/// an error pair is numerically zero (exactly representable case).
struct RateReport {
    std::optional<double> velocity_l2, velocity_h1;
    std::optional<double> pressure_l2, pressure_h1;
    std::optional<double> vorticity_l2, vorticity_h1;
};

RateReport convergence_rates(std::span<const ErrorReport> reports);

struct ProfilePoint {
    double coord = 0.0;
    double value = 0.0;
};

enum class ProfileLine {
    VerticalUx,   // u_x along the vertical centerline
    HorizontalUy, // u_y along the horizontal centerline
};

std::vector<ProfilePoint> centerline_profile(const ComplexSpaces2D& spaces,
                                             const DiscreteSolution2D& sol, ProfileLine line,
                                             int n_samples);
std::vector<ProfilePoint> centerline_profile(const ComplexSpaces3D& spaces,
                                             const DiscreteSolution3D& sol, ProfileLine line,
                                             int n_samples);

/// Cavity velocity extrema: dense centerline sampling refined by golden
/// section to 1e-10 in the coordinate.
struct CavityExtrema {
    double ux_min_vertical = 0.0;
    double uy_max_horizontal = 0.0;
    double uy_min_horizontal = 0.0;
};

CavityExtrema velocity_extrema(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol);

/// psi(x, y) = int_0^y u_x(x, t) dt by per-span Gauss quadrature; zero on the
/// bottom boundary, path-independent for pointwise solenoidal fields.
double streamfunction_at(const ComplexSpaces2D& spaces, std::span<const double> ux_coeffs,
                         double x, double y);

struct ReferenceRow {
    double coord = 0.0;
    double value = 0.0;
    double re = 0.0;
    std::string component;
    std::string source;
};

/// CSV schema: header "coord,value,re,component,source", UTF-8, LF endings.
std::vector<ReferenceRow> load_reference_profiles(const std::string& path);
void write_reference_profiles(const std::string& path, std::span<const ReferenceRow> rows);

// ---- benchmark case builders and solve drivers ----

CaseDefinition2D make_vortex_case_2d(const ManufacturedCase2D& mc, Formulation formulation,
                                     int kprime, int mesh, double penalty = 0.0);
CaseDefinition2D make_cavity_case_2d(double re, Formulation formulation, int kprime, int mesh,
                                     bool stretched, double penalty = 0.0, double lid_speed = 1.0);
CaseDefinition3D make_vortex_case_3d(const ManufacturedCase3D& mc, Formulation formulation,
                                     int kprime, int mesh, double penalty = 0.0);
CaseDefinition3D make_cavity_case_3d(double re, Formulation formulation, int kprime, int mesh,
                                     bool stretched, double penalty = 0.0, double lid_speed = 1.0);

/// Residual floor of the penalty-dominated rows in double precision; solve
/// drivers clamp abs_tol to it so stiff boundary rows cannot stall Newton.
double residual_floor_2d(const CaseDefinition2D& c, const DofMap& dm);
double residual_floor_3d(const CaseDefinition3D& c, const DofMap& dm);

struct SolveOutcome2D {
    DiscreteSolution2D solution;
    SolveReport report;
};
struct SolveOutcome3D {
    DiscreteSolution3D solution;
    SolveReport report;
};
struct SolveOutcomeMapped {
    DiscreteSolution2D solution;
    SolveReport report;
};

SolveOutcome2D solve_case_2d(const CaseDefinition2D& c, const NewtonSettings& settings = {});
SolveOutcome3D solve_case_3d(const CaseDefinition3D& c, const NewtonSettings& settings = {});
SolveOutcomeMapped solve_mapped_case(const MappedStokesCase& c,
                                     const NewtonSettings& settings = {});

/// Continuation over a Reynolds ladder for a case family (shared spaces).
SolveOutcome2D solve_case_2d_continuation(const std::function<CaseDefinition2D(double)>& family,
                                          std::span<const double> ladder,
                                          const NewtonSettings& settings = {});
SolveOutcome3D solve_case_3d_continuation(const std::function<CaseDefinition3D(double)>& family,
                                          std::span<const double> ladder,
                                          const NewtonSettings& settings = {});

} // namespace divcol
