#pragma once

#include <Eigen/Core>

#include "boxrel/rng.hpp"

namespace boxrel::model {

/// Experiment coordinates: y = A x0 + z with A of size m x n, entries
/// N(0, 1/n), noise variance sigma_sq, SNR = 1/sigma_sq.
struct ProblemShape {
    int n = 0;              // transmit dimension
    int m = 0;              // measurement dimension, round(delta * n)
    double delta = 0.0;     // requested ratio m/n (used by theory)
    double sigma_sq = 0.0;  // noise variance, linear
    double snr = 0.0;       // 1 / sigma_sq
    double snr_db = 0.0;

    double realized_delta() const { return static_cast<double>(m) / n; }
};

// m = round(delta*n), clamped to >= 1; sigma_sq = 10^(-snr_db/10).
// snr_db = +infinity gives the noiseless shape (sigma_sq = 0).
ProblemShape make_shape(int n, double delta, double snr_db);

/// One realization of the measurement model.
struct ChannelInstance {
    Eigen::MatrixXd A;   // m x n, iid N(0, 1/n)
    Eigen::VectorXd x0;  // in {-1,+1}^n
    Eigen::VectorXd z;   // iid N(0, sigma_sq)
    Eigen::VectorXd y;   // A*x0 + z
};

// Draws one instance. The channel / noise / signal purpose streams are
// derived from `key`, so identical keys give bit-identical instances
// regardless of what else ran. force_all_ones pins x0 = 1_n.
ChannelInstance sample_instance(const ProblemShape& shape, const StreamKey& key,
                                bool force_all_ones = false);

// max_i |y - (A*x0 + z)|_i, evaluated with the same arithmetic used to
// construct y; exactly zero for any sampled instance.
double construction_residual(const ChannelInstance& inst);

// (A*D, D*x0, z) with D = diag(signs), signs in {-1,+1}^n; y is untouched.
// Support for the solver's sign-relabeling equivariance tests.
ChannelInstance relabel_signs(const ChannelInstance& inst, const Eigen::VectorXd& signs);

}  // namespace boxrel::model
