#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <vector>

namespace divcol {

struct NewtonSettings {
    double abs_tol = 1e-11; // on the residual infinity norm
    double rel_tol = 1e-10; // vs the initial residual
    int max_iters = 25;
    std::vector<double> continuation_ladder; // optional Reynolds ladder
};

struct LinearStats {
    long matrix_nonzeros = 0;
    long factor_nonzeros = -1; // -1 when the backend does not report it
    double backward_error = 0.0;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    LinearStats linear;
};

/// Residual callback: fills r(x); when jac is non-null also fills the exact
/// Jacobian at x.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::SparseMatrix<double>* jac)>;

/// Direct sparse solve (supernodal LU, partial pivoting, COLAMD ordering) with
/// one step of iterative refinement when needed. Throws SingularSystem if the
/// factorization fails or the backward error stays above 1e-10.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs);
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             LinearStats& stats);

/// Full-step Newton-Raphson. Stops when |r|_inf <= abs_tol or
/// |r|_inf <= rel_tol * |r0|_inf. Throws SolveFailure on divergence
/// (growth x1e4 over the initial residual, or NaN) and on max-iters.
std::pair<Eigen::VectorXd, SolveReport>
newton_solve(const ResidualFn& fn, Eigen::VectorXd initial, const NewtonSettings& settings);

struct ContinuationResult {
    Eigen::VectorXd solution;
    SolveReport final_report;
    std::vector<SolveReport> stage_reports;
    std::vector<double> ladder;
};

/// Solve a Reynolds-parameterized family along an increasing ladder, feeding
/// each converged state to the next stage as the initial guess.
ContinuationResult continuation_solve(const std::function<ResidualFn(double)>& family,
                                      std::span<const double> ladder,
                                      const Eigen::VectorXd& initial,
                                      const NewtonSettings& settings);

/// {100, 400} entries strictly below the target, then the target itself.
std::vector<double> default_ladder(double target_re);

} // namespace divcol
