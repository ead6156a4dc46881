#pragma once

#include <span>
#include <vector>

namespace divcol {

/// Univariate B-spline space descriptor: degree plus a non-decreasing knot
/// sequence. The basis size is n = knots.size() - degree - 1.
struct KnotVector {
    int degree = 0;
    std::vector<double> knots;

    int count() const { return static_cast<int>(knots.size()) - degree - 1; }
    double domain_begin() const { return knots[degree]; }
    double domain_end() const { return knots[knots.size() - degree - 1]; }
    int num_spans() const { return count() - degree; } // nonempty spans for open knot vectors

    /// Index i of the nonempty span [knots[i], knots[i+1]) containing x; the
    /// right domain endpoint maps to the last nonempty span.
    int find_span(double x) const;

    /// True when first and last knot values each appear exactly degree+1 times.
    bool is_open() const;
};

/// Basis values and derivatives on the span containing the query point.
/// Entry j corresponds to basis function span - degree + j, j = 0..degree.
struct BasisEval {
    int span = 0;
    std::vector<double> values;
    std::vector<double> first_derivs;
    std::vector<double> second_derivs;

    int first_basis(int degree) const { return span - degree; }
};

/// Open knot vector on strictly increasing breakpoints: first/last repeated
/// degree+1 times, interior breakpoints once (maximal smoothness).
KnotVector make_open_knot_vector(int degree, std::span<const double> breakpoints);

/// Wall-refined breakpoints 0 = xi_0 < ... < xi_N = 1 with interior points
/// xi_i = (1 + tanh(4ih - 2)/tanh 2)/2, h = 1/N. Symmetric about 0.5.
std::vector<double> stretched_breakpoints(int num_elements);

/// Cox-de Boor evaluation with derivatives up to max_deriv (<= 2). Uses the
/// zero-divided-by-zero-is-zero convention.
void eval_basis(const KnotVector& kv, double x, int max_deriv, BasisEval& out);
BasisEval eval_basis(const KnotVector& kv, double x, int max_deriv);

/// Knot averages hat(xi)_i = (xi_{i+1} + ... + xi_{i+degree})/degree, one per
/// basis function. Requires degree >= 1.
std::vector<double> greville_abscissae(const KnotVector& kv);

/// Degree k-1 open knot vector spanning the image of d/dxi on the input space
/// (drops one repetition of the first and last knot).
KnotVector derivative_knot_vector(const KnotVector& kv);

/// Coefficients of the derivative spline in derivative_knot_vector(kv):
/// d_i = degree * (c_{i+1} - c_i) / (knots[i+degree+1] - knots[i+1]).
std::vector<double> derivative_coefficients(const KnotVector& kv, std::span<const double> coeffs);

/// Exact integrals of each basis function: (knots[i+degree+1] - knots[i]) / (degree+1).
std::vector<double> basis_integrals(const KnotVector& kv);

} // namespace divcol
