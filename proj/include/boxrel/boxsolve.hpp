#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "boxrel/errors.hpp"

namespace boxrel::solve {

/// Output of the box-constrained least-squares solver.
struct BoxSolution {
    Eigen::VectorXd x_hat;        // relaxed estimate, every coordinate in [-1, 1]
    int iterations = 0;           // accepted iterations
    double kkt_residual = 0.0;    // optimality certificate, see kkt_residual()
    double objective = 0.0;       // ||y - A x_hat||_2
    std::vector<double> objective_history;  // best ||y - A x||_2 up to each iterate, nonincreasing
};

// Thrown when the iteration budget runs out before certification; carries the
// last iterate so callers can inspect (and count) the failure.
class non_convergence : public numerical_failure {
public:
    non_convergence(const std::string& what, BoxSolution last_iterate)
        : numerical_failure(what), last(std::move(last_iterate)) {}
    BoxSolution last;
};

/// Hard decisions and per-bit error bookkeeping.
struct DetectionResult {
    Eigen::VectorXd x_star;               // in {-1, +1}^n
    double ber = 0.0;                     // (# errors)/n
    std::vector<std::uint8_t> error_mask; // error_mask[i] = 1 iff x_star[i] != x0[i]
};

// Largest eigenvalue of A^T A (squared spectral norm), via power iteration
// from the deterministic all-ones start vector, converged to relative
// accuracy tol. Returns 0 for the zero matrix. Multiply by 1.01 before use
// as a gradient Lipschitz constant.
double operator_norm_sq(const Eigen::MatrixXd& A, double tol = 1e-6);

// Projected-gradient fixed-point residual ||x - P(x - A^T(Ax - y))||_inf,
// P = coordinate-wise clipping to [-1, 1]. Zero iff x satisfies first-order
// optimality for min ||y - Ax|| over the box. Requires x in the box.
double kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& x);

// Solves min_{x in [-1,1]^n} (1/2)||y - Ax||^2 by accelerated projected
// gradient (step 1/L, L = 1.01 * operator_norm_sq) with function-value
// monotone restart. Terminates when kkt_residual <= tol. max_iter = 0 means
// 50*n. Throws non_convergence when the budget is exhausted.
BoxSolution solve_box_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                         double tol = 1e-8, int max_iter = 0);

// Coordinate-wise sign with the deterministic tie rule sign(0) = +1.
Eigen::VectorXd detect_signs(const Eigen::VectorXd& x_hat);

// Fraction of disagreeing coordinates plus the per-bit error mask. Both
// inputs must be +/-1 valued vectors of equal length.
DetectionResult bit_error_rate(const Eigen::VectorXd& x_star, const Eigen::VectorXd& x0);

// Ground-truth box-constrained least squares for n <= 10: enumerates all 3^n
// assignments of coordinates to {fixed -1, fixed +1, free}, solves the free
// least squares, keeps feasible KKT-consistent candidates (multiplier
// tolerance 1e-10), returns the one with minimal objective.
Eigen::VectorXd oracle_box_ls_active_set(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

struct MlResult {
    Eigen::VectorXd x;       // minimizer over {-1,+1}^n
    double objective = 0.0;  // ||y - A x||_2
};

// Exhaustive maximum-likelihood search over {-1,+1}^n for n <= 16; ties
// broken toward the lexicographically smallest vector (-1 before +1).
MlResult oracle_ml_exhaustive(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

}  // namespace boxrel::solve
