#include "boxrel/boxsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace boxrel::solve {

namespace {

inline Eigen::VectorXd clip_box(const Eigen::VectorXd& v) {
    return v.cwiseMax(-1.0).cwiseMin(1.0);
}

void check_dims(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    if (A.rows() != y.size())
        throw std::invalid_argument("boxsolve: A rows and y length disagree");
    if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("boxsolve: empty matrix");
}

}  // namespace

double operator_norm_sq(const Eigen::MatrixXd& A, double tol) {
    if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("operator_norm_sq: empty matrix");
    if (!(tol > 0.0)) throw std::invalid_argument("operator_norm_sq: tol must be > 0");

    const Eigen::Index n = A.cols();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd av(A.rows()), w(n);
    double lambda = 0.0;
    // Power iteration on A^T A; the Rayleigh quotient approaches the top
    // eigenvalue from below, so the caller's 1.01 safety factor needs the
    // change-based stop to sit well under tol.
    const int cap = 100000;
    for (int it = 0; it < cap; ++it) {
        av.noalias() = A * v;
        w.noalias() = A.transpose() * av;
        const double rayleigh = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;  // start vector annihilated: zero matrix
        v = w / wn;
        if (it > 0 && std::abs(rayleigh - lambda) <= 1e-3 * tol * std::max(rayleigh, 1e-300))
            return rayleigh;
        lambda = rayleigh;
    }
    return lambda;
}

double kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& x) {
    check_dims(A, y);
    if (x.size() != A.cols()) throw std::invalid_argument("kkt_residual: x length mismatch");
    if ((x.array().abs() > 1.0).any())
        throw std::invalid_argument("kkt_residual: x must lie in [-1,1]^n");
    Eigen::VectorXd g = A.transpose() * (A * x - y);
    return (x - clip_box(x - g)).lpNorm<Eigen::Infinity>();
}

BoxSolution solve_box_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double tol,
                         int max_iter) {
    check_dims(A, y);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_box_ls: tol must be > 0");
    const Eigen::Index n = A.cols();
    const Eigen::Index m = A.rows();
    if (max_iter <= 0) max_iter = 50 * static_cast<int>(n);

    BoxSolution sol;
    const double lambda = operator_norm_sq(A, 1e-6);
    if (lambda == 0.0) {
        // Zero operator: every box point is optimal; return the center.
        sol.x_hat = Eigen::VectorXd::Zero(n);
        sol.objective = y.norm();
        sol.kkt_residual = 0.0;
        sol.objective_history.push_back(sol.objective);
        return sol;
    }
    double step = 1.0 / (1.01 * lambda);

    // FISTA on f(x) = (1/2)||Ax - y||^2 over the box, with function-value
    // restart. A*v is maintained by linearity of the momentum combination,
    // so the steady-state cost is three mat-vec products per iteration.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ax = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd v = x, av = ax;
    Eigen::VectorXd g(n), x_new(n), ax_new(m), gx(n);
    double f = 0.5 * y.squaredNorm();
    double f_best = f;
    double t = 1.0;
    sol.objective_history.push_back(std::sqrt(2.0 * f));

    // Near the optimum the true per-step descent drops below the rounding
    // noise of evaluating f itself, so only an increase beyond a few ulps of
    // f counts as a momentum overshoot. The recorded history tracks the best
    // value so far and the kkt residual carries the actual certificate.
    const auto overshoot = [](double cand, double ref) {
        return cand > ref + 1e-14 * (ref + 1.0);
    };

    // A single bitwise-repeated iterate can be a coincidence of clipping at
    // the momentum point v != x; it zeroes the momentum term, so the next
    // iterate is the plain projected-gradient step from x. Only a second
    // consecutive repeat proves the step map is frozen.
    bool stalled_prev = false;

    for (int iter = 1; iter <= max_iter; ++iter) {
        g.noalias() = A.transpose() * (av - y);
        x_new = clip_box(v - step * g);
        ax_new.noalias() = A * x_new;
        double f_new = 0.5 * (ax_new - y).squaredNorm();

        if (overshoot(f_new, f)) {
            // Momentum overshoot: restart from the last accepted iterate.
            t = 1.0;
            g.noalias() = A.transpose() * (ax - y);
            x_new = clip_box(x - step * g);
            ax_new.noalias() = A * x_new;
            f_new = 0.5 * (ax_new - y).squaredNorm();
            int halvings = 0;
            while (overshoot(f_new, f) && halvings < 60) {
                // Descent is guaranteed for step <= 1/L; shrinking here guards
                // against an underconverged operator-norm estimate.
                step *= 0.5;
                ++halvings;
                x_new = clip_box(x - step * g);
                ax_new.noalias() = A * x_new;
                f_new = 0.5 * (ax_new - y).squaredNorm();
            }
            if (overshoot(f_new, f)) {
                // No representable descent: we are at the numerical optimum.
                x_new = x;
                ax_new = ax;
                f_new = f;
            }
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        v = x_new + beta * (x_new - x);
        av = ax_new + beta * (ax_new - ax);
        t = t_next;
        const bool stalled_now = (x_new == x);
        x = x_new;
        ax = ax_new;
        f = f_new;
        f_best = std::min(f_best, f);
        sol.objective_history.push_back(std::sqrt(2.0 * f_best));
        sol.iterations = iter;

        gx.noalias() = A.transpose() * (ax - y);
        const double res = (x - clip_box(x - gx)).lpNorm<Eigen::Infinity>();
        if (res <= tol) {
            sol.x_hat = x;
            sol.kkt_residual = res;
            sol.objective = std::sqrt(2.0 * f);
            return sol;
        }
        if (stalled_now && stalled_prev) {
            sol.x_hat = x;
            sol.kkt_residual = res;
            sol.objective = std::sqrt(2.0 * f);
            std::ostringstream msg;
            msg << "solve_box_ls: stalled at kkt residual " << res << " (tol " << tol
                << ") after " << iter << " iterations";
            throw non_convergence(msg.str(), std::move(sol));
        }
        stalled_prev = stalled_now;
    }

    gx.noalias() = A.transpose() * (ax - y);
    sol.x_hat = x;
    sol.kkt_residual = (x - clip_box(x - gx)).lpNorm<Eigen::Infinity>();
    sol.objective = std::sqrt(2.0 * f);
    std::ostringstream msg;
    msg << "solve_box_ls: kkt residual " << sol.kkt_residual << " > tol " << tol << " after "
        << max_iter << " iterations";
    throw non_convergence(msg.str(), std::move(sol));
}

Eigen::VectorXd detect_signs(const Eigen::VectorXd& x_hat) {
    Eigen::VectorXd s(x_hat.size());
    for (Eigen::Index i = 0; i < x_hat.size(); ++i)
        s(i) = (x_hat(i) >= 0.0) ? 1.0 : -1.0;  // sign(0) := +1, so -0.0 maps to +1 too
    return s;
}

DetectionResult bit_error_rate(const Eigen::VectorXd& x_star, const Eigen::VectorXd& x0) {
    if (x_star.size() != x0.size())
        throw std::invalid_argument("bit_error_rate: length mismatch");
    if (x_star.size() == 0) throw std::invalid_argument("bit_error_rate: empty input");
    DetectionResult det;
    det.x_star = x_star;
    det.error_mask.resize(static_cast<std::size_t>(x_star.size()));
    long long errors = 0;
    for (Eigen::Index i = 0; i < x_star.size(); ++i) {
        if ((x_star(i) != 1.0 && x_star(i) != -1.0) || (x0(i) != 1.0 && x0(i) != -1.0))
            throw std::invalid_argument("bit_error_rate: inputs must be +/-1 valued");
        const bool err = x_star(i) != x0(i);
        det.error_mask[static_cast<std::size_t>(i)] = err ? 1 : 0;
        errors += err ? 1 : 0;
    }
    det.ber = static_cast<double>(errors) / static_cast<double>(x_star.size());
    return det;
}

Eigen::VectorXd oracle_box_ls_active_set(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    check_dims(A, y);
    const int n = static_cast<int>(A.cols());
    if (n > 10)
        throw std::invalid_argument(
            "oracle_box_ls_active_set: refusing n > 10 (3^n enumeration)");
    const double kkt_tol = 1e-10;

    long long total = 1;
    for (int i = 0; i < n; ++i) total *= 3;

    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    std::vector<int> digit(static_cast<std::size_t>(n));
    std::vector<int> free_idx;
    free_idx.reserve(static_cast<std::size_t>(n));

    for (long long code = 0; code < total; ++code) {
        long long rem = code;
        for (int i = 0; i < n; ++i) {
            digit[static_cast<std::size_t>(i)] = static_cast<int>(rem % 3);
            rem /= 3;
        }
        // digit: 0 -> fixed at -1, 1 -> fixed at +1, 2 -> free
        free_idx.clear();
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd resid = y;
        for (int i = 0; i < n; ++i) {
            if (digit[static_cast<std::size_t>(i)] == 2) {
                free_idx.push_back(i);
            } else {
                x(i) = digit[static_cast<std::size_t>(i)] == 0 ? -1.0 : 1.0;
                resid -= A.col(i) * x(i);
            }
        }
        if (!free_idx.empty()) {
            Eigen::MatrixXd Af(A.rows(), static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t j = 0; j < free_idx.size(); ++j) Af.col(j) = A.col(free_idx[j]);
            // Minimum-norm least squares keeps the candidate deterministic
            // even when the free block is rank deficient.
            Eigen::VectorXd xf = Af.completeOrthogonalDecomposition().solve(resid);
            bool feasible = true;
            for (Eigen::Index j = 0; j < xf.size(); ++j)
                if (std::abs(xf(j)) > 1.0 + 1e-12) feasible = false;
            if (!feasible) continue;
            for (std::size_t j = 0; j < free_idx.size(); ++j)
                x(free_idx[j]) = std::min(1.0, std::max(-1.0, xf(static_cast<Eigen::Index>(j))));
        }

        const Eigen::VectorXd grad = A.transpose() * (A * x - y);
        bool kkt_ok = true;
        for (int i = 0; i < n && kkt_ok; ++i) {
            const int d = digit[static_cast<std::size_t>(i)];
            if (d == 2)
                kkt_ok = std::abs(grad(i)) <= kkt_tol;
            else if (d == 1)
                kkt_ok = grad(i) <= kkt_tol;  // at upper bound, only descent blocked
            else
                kkt_ok = grad(i) >= -kkt_tol;
        }
        if (!kkt_ok) continue;

        const double obj = (y - A * x).norm();
        if (obj < best_obj) {
            best_obj = obj;
            best_x = x;
        }
    }
    if (!best_x.size())
        throw numerical_failure("oracle_box_ls_active_set: no KKT-consistent candidate found");
    return best_x;
}

MlResult oracle_ml_exhaustive(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    check_dims(A, y);
    const int n = static_cast<int>(A.cols());
    if (n > 16)
        throw std::invalid_argument("oracle_ml_exhaustive: refusing n > 16 (2^n search)");

    MlResult best;
    double best_sq = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(n);
    for (std::uint64_t code = 0; code < (1ull << n); ++code) {
        // Coordinate 0 in the most significant bit position: ascending code is
        // ascending lexicographic order with -1 < +1, so strict improvement
        // keeps the lexicographically smallest minimizer.
        for (int i = 0; i < n; ++i)
            x(i) = ((code >> (n - 1 - i)) & 1ull) ? 1.0 : -1.0;
        const double obj_sq = (y - A * x).squaredNorm();
        if (obj_sq < best_sq) {
            best_sq = obj_sq;
            best.x = x;
        }
    }
    best.objective = std::sqrt(best_sq);
    return best;
}

}  // namespace boxrel::solve
