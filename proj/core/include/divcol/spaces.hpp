#pragma once

#include "divcol/splines.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace divcol {

/// Tensor-product B-spline space: one knot vector per parametric direction.
/// Coefficients are ordered lexicographically with x fastest, then y, then z.
struct TensorSpace {
    std::vector<KnotVector> kv;

    int dims() const { return static_cast<int>(kv.size()); }
    int count(int dir) const { return kv[dir].count(); }
    long dim() const {
        long d = 1;
        for (const auto& k : kv)
            d *= k.count();
        return d;
    }
    long flat_index(std::span<const int> midx) const {
        long idx = 0;
        for (int d = dims() - 1; d >= 0; --d)
            idx = idx * count(d) + midx[d];
        return idx;
    }
};

/// 2D de Rham-conforming bundle: psi (degree k'+1 both directions), the two
/// velocity component spaces, and the pressure space (degree k' both).
struct ComplexSpaces2D {
    int kprime = 0;
    TensorSpace psi;   // S^{k'+1, k'+1}
    TensorSpace vel_x; // S^{k'+1, k'  }
    TensorSpace vel_y; // S^{k',   k'+1}
    TensorSpace pres;  // S^{k',   k'  }
};

/// 3D analogue: potential, three vorticity components (one direction reduced
/// each), three velocity components (two reduced each), pressure (all reduced).
struct ComplexSpaces3D {
    int kprime = 0;
    TensorSpace phi;
    std::array<TensorSpace, 3> omega;
    std::array<TensorSpace, 3> vel;
    TensorSpace pres;
};

/// Scalar field sample: value, gradient, and (when requested) the symmetric
/// second-derivative matrix stored as [xx, yy, zz, xy, xz, yz].
struct FieldSample {
    double value = 0.0;
    std::array<double, 3> gradient{0.0, 0.0, 0.0};
    std::array<double, 6> second{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
};

ComplexSpaces2D build_complex_2d(int kprime, std::span<const double> breakpoints_x,
                                 std::span<const double> breakpoints_y);

ComplexSpaces3D build_complex_3d(int kprime, std::span<const double> breakpoints_x,
                                 std::span<const double> breakpoints_y,
                                 std::span<const double> breakpoints_z);

/// Tensor-product evaluation of a scalar spline field.
FieldSample eval_field(const TensorSpace& space, std::span<const double> coeffs,
                       std::span<const double> point, int max_deriv);

/// One Greville point of a tensor grid with its multi-index and face tags.
/// Face bit 2*d marks the min face in direction d, bit 2*d+1 the max face.
struct GrevillePoint {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    std::uint8_t faces = 0;

    bool interior() const { return faces == 0; }
    bool on_face(int dir, int side) const { return faces & (1u << (2 * dir + side)); }
};

/// Tensor product of per-direction Greville abscissae in lexicographic order
/// (x fastest); classification by multi-index, one point per basis function.
std::vector<GrevillePoint> greville_grid(const TensorSpace& space);

/// Derivative along one direction at coefficient level; the result lives in
/// the space with kv[dir] replaced by its derivative knot vector.
std::vector<double> derivative_coeffs(const TensorSpace& space, std::span<const double> coeffs,
                                      int dir);

/// Coefficients of div(u) in the pressure space (exact, coefficient-level).
std::vector<double> divergence_coeffs_2d(const ComplexSpaces2D& spaces,
                                         std::span<const double> ux_coeffs,
                                         std::span<const double> uy_coeffs);

/// Coefficients of the rotor grad-perp(psi) = (d psi/dy, -d psi/dx) in the
/// velocity component spaces.
std::pair<std::vector<double>, std::vector<double>>
rotor_coeffs_2d(const ComplexSpaces2D& spaces, std::span<const double> psi_coeffs);

std::array<std::vector<double>, 3> gradient_coeffs_3d(const ComplexSpaces3D& spaces,
                                                      std::span<const double> phi_coeffs);

std::array<std::vector<double>, 3> curl_coeffs_3d(const ComplexSpaces3D& spaces,
                                                  std::span<const double> wx,
                                                  std::span<const double> wy,
                                                  std::span<const double> wz);

std::vector<double> divergence_coeffs_3d(const ComplexSpaces3D& spaces,
                                         std::span<const double> ux,
                                         std::span<const double> uy,
                                         std::span<const double> uz);

/// Coefficients interpolating f at the tensor Greville grid (exact for any
/// function already in the space).
std::vector<double> greville_interpolate(const TensorSpace& space,
                                         const std::vector<GrevillePoint>& grid,
                                         std::span<const double> values);

} // namespace divcol
