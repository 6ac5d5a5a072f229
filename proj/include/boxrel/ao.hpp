#pragma once

#include <Eigen/Core>

#include "boxrel/model.hpp"
#include "boxrel/rng.hpp"

namespace boxrel::ao {

/// One draw of the decoupled auxiliary problem. Only two Gaussian vectors are
/// needed: the measurement-side g (length m) and the coordinate-side h
/// (length n). The additive noise enters through sigma_sq alone, via the
/// Gaussian-merging identity that folds ||w|| g - sqrt(n) z into a single
/// vector with variance ||w||^2 + n sigma_sq.
struct AoSample {
    Eigen::VectorXd g;      // m-vector, iid standard normal
    Eigen::VectorXd h;      // n-vector, iid standard normal
    double sigma_sq = 0.0;
    double delta = 0.0;     // requested m/n
    int n = 0;
};

// Draws g from the channel stream and h from the noise stream of `key`.
AoSample sample_ao(const model::ProblemShape& shape, const StreamKey& key);

// Scalarized auxiliary objective (pre-rescaling units):
//   chi(tau) = tau ||g|| / (2 sqrt(n)) + sigma_sq ||g|| / (2 tau sqrt(n))
//            + (1/n) sum_i v(tau; h_i, ||g||)
// with the three-branch integrand
//   v = 0                                   for h_i >= 0
//   v = -(tau sqrt(n) / (2||g||)) h_i^2     for -2||g||/(tau sqrt(n)) <= h_i < 0
//   v = 2||g||/(tau sqrt(n)) + 2 h_i        for h_i <  -2||g||/(tau sqrt(n)).
// Convex in tau. Throws std::invalid_argument for tau <= 0.
double ao_objective(double tau, const AoSample& sample);

// Optimal error vector given the scalar tau (pre-rescaling units):
// coordinate-wise 0 / (tau sqrt(n)/||g||) h_i / -2 per the branches above.
// Every output coordinate lies in [-2, 0].
Eigen::VectorXd ao_w_from_tau(double tau, double g_norm, const Eigen::VectorXd& h);

/// Minimizer of the scalarized auxiliary problem and its reconstruction.
struct AoSolution {
    double tau_hat = 0.0;   // minimizing scalar, rescaled by 1/sqrt(delta)
    double tau_pre = 0.0;   // same minimizer before rescaling (diagnostic)
    Eigen::VectorXd w_tilde;          // optimal error vector, in [-2, 0]^n
    double ao_objective_value = 0.0;  // chi(tau_pre) clamped at 0 from below
    double ao_ber = 0.0;              // (1/n) #{i : w_tilde_i <= -1}
    bool clamp_active = false;        // chi(tau_pre) < 0, objective clamped
    int iterations = 0;               // golden-section iterations
};

// Minimizes ao_objective by golden-section search on [1e-4, b], doubling b
// from 10 until the minimum is interior (cap 1e6, then numerical_failure).
// tau_hat concentrates on tau* as n grows; the error indicator satisfies
// 1{w_tilde_i <= -1} = 1{h_i <= -||g|| / (sqrt(n) sqrt(delta) tau_hat)}
// exactly. Samples with clamp_active are flagged so aggregators can exclude
// them from concentration statistics.
AoSolution ao_solve(const AoSample& sample);

}  // namespace boxrel::ao
