#pragma once

#include "divcol/dofmap.hpp"
#include "divcol/spaces.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>

namespace divcol {

/// One steady problem on the unit square. For VVP the solved pressure variable
/// is the total pressure P (kinematic when stokes_only drops the rotational
/// convection term).
struct CaseDefinition2D {
    Formulation formulation = Formulation::VVP;
    double nu = 1.0;
    std::function<std::array<double, 2>(double, double)> forcing;
    std::function<std::array<double, 2>(double, double)> dirichlet;
    double penalty_constant = 0.0; // C_pen; see default_penalty
    ComplexSpaces2D spaces;
    bool stokes_only = false;
    GaugeMode gauge = GaugeMode::ZeroMean;
};

/// Default penalty constant C_pen = 5(k'+1).
double default_penalty(int kprime);

/// Classify coefficients (free / fixed-by-normal-BC via 1D Greville trace
/// interpolation) and lay out the collocation equations: momentum rows at the
/// matching velocity-component Greville grids with no-penetration points
/// removed, continuity at the pressure grid, constitutive (VVP) at the psi
/// grid with boundary penalty tags.
DofMap build_dof_map(const CaseDefinition2D& c);

struct AssemblyResult {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> jacobian; // empty unless requested
};

AssemblyResult assemble_vp(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                           bool want_jacobian);
AssemblyResult assemble_vvp(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                            bool want_jacobian);
AssemblyResult assemble_2d(const CaseDefinition2D& c, const DiscreteSolution2D& sol,
                           bool want_jacobian);
AssemblyResult assemble_2d(const CaseDefinition2D& c, const DofMap& dm,
                           const DiscreteSolution2D& sol, bool want_jacobian);

/// Solution with zero free coefficients and BC-fixed values applied.
DiscreteSolution2D zero_solution(const CaseDefinition2D& c, const DofMap& dm);
DiscreteSolution2D solution_from_vector(const CaseDefinition2D& c, const DofMap& dm,
                                        const Eigen::VectorXd& x);
Eigen::VectorXd vector_from_solution(const CaseDefinition2D& c, const DofMap& dm,
                                     const DiscreteSolution2D& sol);

/// max |div u^h| over n_samples Halton points of the parametric domain.
double divergence_max(const ComplexSpaces2D& spaces, const DiscreteSolution2D& sol, int n_samples);

} // namespace divcol
