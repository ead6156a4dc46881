#pragma once

#include "divcol/colloc2d.hpp" // AssemblyResult
#include "divcol/dofmap.hpp"
#include "divcol/spaces.hpp"

#include <functional>

namespace divcol {

struct CaseDefinition3D {
    Formulation formulation = Formulation::VVP;
    double nu = 1.0;
    std::function<std::array<double, 3>(double, double, double)> forcing;
    std::function<std::array<double, 3>(double, double, double)> dirichlet;
    double penalty_constant = 0.0;
    ComplexSpaces3D spaces;
    bool stokes_only = false;
    GaugeMode gauge = GaugeMode::ZeroMean;
};

/// 3D DOF bookkeeping: normal-component coefficients on each face fixed via a
/// tensor-product of two 1D Greville trace interpolations; momentum components
/// collocated at their velocity grids (no-penetration points removed),
/// continuity at the pressure grid, constitutive components (VVP) at the
/// matching vorticity grids with cross-product penalty tags. Edge and corner
/// points sum the penalty contributions of all incident faces.
DofMap build_dof_map_3d(const CaseDefinition3D& c);

AssemblyResult assemble_vp_3d(const CaseDefinition3D& c, const DiscreteSolution3D& sol,
                              bool want_jacobian);
AssemblyResult assemble_vvp_3d(const CaseDefinition3D& c, const DiscreteSolution3D& sol,
                               bool want_jacobian);
AssemblyResult assemble_3d(const CaseDefinition3D& c, const DofMap& dm,
                           const DiscreteSolution3D& sol, bool want_jacobian);

DiscreteSolution3D zero_solution(const CaseDefinition3D& c, const DofMap& dm);
DiscreteSolution3D solution_from_vector(const CaseDefinition3D& c, const DofMap& dm,
                                        const Eigen::VectorXd& x);
Eigen::VectorXd vector_from_solution(const CaseDefinition3D& c, const DofMap& dm,
                                     const DiscreteSolution3D& sol);

double divergence_max(const ComplexSpaces3D& spaces, const DiscreteSolution3D& sol, int n_samples);

} // namespace divcol
