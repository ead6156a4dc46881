#include "divcol/solver.hpp"

#include "divcol/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace divcol {

namespace {

double backward_error(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& b) {
    const double rnorm = (A * x - b).lpNorm<Eigen::Infinity>();
    double anorm = 0.0; // infinity norm: max absolute row sum
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            rowsum[it.row()] += std::abs(it.value());
    anorm = rowsum.maxCoeff();
    const double denom = anorm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    return denom > 0.0 ? rnorm / denom : rnorm;
}

} // namespace

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs) {
    LinearStats stats;
    return solve_linear(matrix, rhs, stats);
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             LinearStats& stats) {
    if (matrix.rows() != matrix.cols())
        throw InvalidInput("solve_linear: matrix not square");
    if (matrix.rows() != rhs.size())
        throw InvalidInput("solve_linear: rhs size mismatch");

    Eigen::SparseMatrix<double> A = matrix;
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("sparse LU factorization failed: " + lu.lastErrorMessage());

    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("sparse LU solve failed");

    stats.matrix_nonzeros = A.nonZeros();
    stats.factor_nonzeros = static_cast<long>(lu.nnzL()) + static_cast<long>(lu.nnzU());
    stats.backward_error = backward_error(A, x, rhs);
    if (stats.backward_error > 1e-12) {
        // one step of iterative refinement
        const Eigen::VectorXd corr = lu.solve(rhs - A * x);
        x += corr;
        stats.backward_error = backward_error(A, x, rhs);
    }
    if (!std::isfinite(stats.backward_error) || stats.backward_error > 1e-10)
        throw SingularSystem("numerically singular system: backward error " +
                             std::to_string(stats.backward_error));
    return x;
}

std::pair<Eigen::VectorXd, SolveReport>
newton_solve(const ResidualFn& fn, Eigen::VectorXd x, const NewtonSettings& settings) {
    if (settings.abs_tol <= 0.0 || settings.rel_tol < 0.0)
        throw InvalidInput("newton_solve: tolerances must be positive");
    if (settings.max_iters < 1)
        throw InvalidInput("newton_solve: max_iters must be >= 1");

    SolveReport report;
    Eigen::VectorXd r;
    Eigen::SparseMatrix<double> jac;

    fn(x, r, nullptr);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    const double r0 = rnorm;
    report.residual_history.push_back(rnorm);

    auto done = [&](double v) { return v <= settings.abs_tol || v <= settings.rel_tol * r0; };

    if (done(rnorm)) {
        report.converged = true;
        return {std::move(x), std::move(report)};
    }

    for (int it = 1; it <= settings.max_iters; ++it) {
        fn(x, r, &jac);
        Eigen::VectorXd dx;
        try {
            dx = solve_linear(jac, -r, report.linear);
        } catch (const SingularSystem& e) {
            throw SolveFailure(SolveFailure::Kind::SingularJacobian,
                               std::string("Newton iteration ") + std::to_string(it) + ": " + e.what());
        }
        x += dx;
        fn(x, r, nullptr);
        rnorm = r.lpNorm<Eigen::Infinity>();
        report.residual_history.push_back(rnorm);
        report.iterations = it;

        if (!std::isfinite(rnorm) || rnorm > 1e4 * r0)
            throw SolveFailure(SolveFailure::Kind::Divergence,
                               "Newton diverged at iteration " + std::to_string(it) +
                                   " (residual " + std::to_string(rnorm) + ", initial " +
                                   std::to_string(r0) + ")");
        if (done(rnorm)) {
            report.converged = true;
            return {std::move(x), std::move(report)};
        }
    }
    throw SolveFailure(SolveFailure::Kind::MaxIterations,
                       "Newton did not converge in " + std::to_string(settings.max_iters) +
                           " iterations (residual " + std::to_string(rnorm) + ")");
}

ContinuationResult continuation_solve(const std::function<ResidualFn(double)>& family,
                                      std::span<const double> ladder,
                                      const Eigen::VectorXd& initial,
                                      const NewtonSettings& settings) {
    if (ladder.empty())
        throw InvalidInput("continuation_solve: empty ladder");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (!(ladder[i] > ladder[i - 1]))
            throw InvalidInput("continuation_solve: ladder must be strictly increasing");

    ContinuationResult result;
    result.ladder.assign(ladder.begin(), ladder.end());
    Eigen::VectorXd x = initial;
    for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
        try {
            auto [sol, report] = newton_solve(family(ladder[stage]), std::move(x), settings);
            x = std::move(sol);
            result.stage_reports.push_back(report);
        } catch (const SolveFailure& e) {
            throw SolveFailure(e.kind(), "continuation stage " + std::to_string(stage + 1) + "/" +
                                             std::to_string(ladder.size()) + " (Re = " +
                                             std::to_string(ladder[stage]) + "): " + e.what());
        }
    }
    result.solution = std::move(x);
    result.final_report = result.stage_reports.back();
    return result;
}

std::vector<double> default_ladder(double target_re) {
    std::vector<double> ladder;
    for (double stage : {100.0, 400.0})
        if (stage < target_re)
            ladder.push_back(stage);
    ladder.push_back(target_re);
    return ladder;
}

} // namespace divcol
