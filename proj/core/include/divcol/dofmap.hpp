#pragma once

#include "divcol/spaces.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace divcol {

enum class Formulation { VP, VVP };

enum class EqKind {
    MomentumX,
    MomentumY,
    MomentumZ,
    Continuity,
    ConstitutiveX, // the scalar constitutive equation in 2D
    ConstitutiveY,
    ConstitutiveZ,
    PressurePin,
};

enum class PenaltyKind {
    VelocityComponent,  // VP: (C^2/h^2)(u_c - g_c) on the row's own component
    TangentialVelocity, // VVP: (C/h)(u.s - g.s) (2D) or cross-product form (3D)
    PressureNormal,     // mapped Neumann edge: (C/h)(dp/dn - 0) on the normal momentum row
};

enum class GaugeMode { ZeroMean, PinFirstDof };

/// One boundary-face penalty contribution attached to a collocation equation.
struct PenaltyFace {
    int dir = 0;       // perpendicular parametric direction
    int side = 0;      // 0 = min face, 1 = max face
    double h = 0.0;    // Greville spacing perpendicular to the face, own grid
    PenaltyKind kind = PenaltyKind::VelocityComponent;
};

/// One collocation equation: its kind, point, grid multi-index, and any
/// boundary penalty contributions.
struct CollocEq {
    EqKind kind = EqKind::Continuity;
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    std::array<PenaltyFace, 3> faces{};
    int num_faces = 0;
};

/// DOF bookkeeping: per-field coefficient classification (free with a global
/// column index, or fixed by the strong normal BC with an interpolated value)
/// plus the ordered collocation equation list. With the zero-mean gauge one
/// extra unknown (the multiplier) and one gauge row keep the system square.
struct DofMap {
    struct FieldDofs {
        std::vector<int> global;       // -1 where fixed
        std::vector<double> fixed;     // BC value where fixed, else 0
        int num_free = 0;
    };

    std::vector<FieldDofs> fields;
    std::vector<CollocEq> equations;   // ordered: momentum, continuity, constitutive
    std::vector<double> gauge_weights; // pressure basis integrals (zero-mean row)
    GaugeMode gauge = GaugeMode::ZeroMean;
    int num_free = 0;                  // free coefficients across fields
    int pressure_field = 0;            // index into fields of the pressure block

    /// Unknown vector length: free coefficients plus the gauge multiplier.
    int num_unknowns() const { return num_free + (gauge == GaugeMode::ZeroMean ? 1 : 0); }
    /// Equation count including the gauge row; equals num_unknowns().
    int num_equations() const {
        return static_cast<int>(equations.size()) + (gauge == GaugeMode::ZeroMean ? 1 : 0);
    }
};

/// Coefficient vectors for one 2D discrete solution. Fixed coefficients carry
/// their boundary values; lambda is the zero-mean gauge multiplier.
struct DiscreteSolution2D {
    std::vector<double> ux, uy, p, w;
    double lambda = 0.0;
};

struct DiscreteSolution3D {
    std::vector<double> ux, uy, uz, p, wx, wy, wz;
    double lambda = 0.0;
};

/// Scatter the packed unknown vector into full coefficient vectors (fixed
/// entries keep their BC values) and back.
void unpack_solution(const DofMap& dm, const Eigen::VectorXd& x,
                     std::vector<std::vector<double>*> fields, double& lambda);
Eigen::VectorXd pack_solution(const DofMap& dm,
                              std::vector<const std::vector<double>*> fields, double lambda);

} // namespace divcol
