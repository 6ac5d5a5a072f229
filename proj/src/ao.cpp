#include "boxrel/ao.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boxrel/errors.hpp"

namespace boxrel::ao {

AoSample sample_ao(const model::ProblemShape& shape, const StreamKey& key) {
    if (shape.n < 1 || shape.m < 1) throw std::invalid_argument("sample_ao: invalid shape");
    AoSample sample;
    sample.n = shape.n;
    sample.delta = shape.delta;
    sample.sigma_sq = shape.sigma_sq;
    RngStream g_stream(key, StreamPurpose::channel);
    sample.g.resize(shape.m);
    for (int i = 0; i < shape.m; ++i) sample.g(i) = g_stream.next_gaussian();
    RngStream h_stream(key, StreamPurpose::noise);
    sample.h.resize(shape.n);
    for (int i = 0; i < shape.n; ++i) sample.h(i) = h_stream.next_gaussian();
    return sample;
}

double ao_objective(double tau, const AoSample& sample) {
    if (!(tau > 0.0)) throw std::invalid_argument("ao_objective: tau must be > 0");
    if (sample.n < 1 || sample.h.size() != sample.n || sample.g.size() < 1)
        throw std::invalid_argument("ao_objective: malformed sample");

    const double sqrt_n = std::sqrt(static_cast<double>(sample.n));
    const double a = sample.g.norm() / sqrt_n;  // ||g|| / sqrt(n)
    const double bound = 2.0 * a / tau;         // branch point 2||g||/(tau sqrt(n))
    const double slope = tau / a;               // tau sqrt(n) / ||g||

    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < sample.h.size(); ++i) {
        const double h = sample.h(i);
        if (h >= 0.0) continue;
        if (h >= -bound)
            acc += -0.5L * slope * h * h;
        else
            acc += bound + 2.0L * h;
    }
    const double mean_v = static_cast<double>(acc / sample.n);
    return 0.5 * tau * a + sample.sigma_sq * a / (2.0 * tau) + mean_v;
}

Eigen::VectorXd ao_w_from_tau(double tau, double g_norm, const Eigen::VectorXd& h) {
    if (!(tau > 0.0)) throw std::invalid_argument("ao_w_from_tau: tau must be > 0");
    if (!(g_norm > 0.0)) throw std::invalid_argument("ao_w_from_tau: g_norm must be > 0");
    const double sqrt_n = std::sqrt(static_cast<double>(h.size()));
    const double bound = 2.0 * g_norm / (tau * sqrt_n);
    const double slope = tau * sqrt_n / g_norm;
    Eigen::VectorXd w(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (h(i) >= 0.0)
            w(i) = 0.0;
        else if (h(i) >= -bound)
            w(i) = slope * h(i);
        else
            w(i) = -2.0;
    }
    return w;
}

AoSolution ao_solve(const AoSample& sample) {
    constexpr double kLo = 1e-4;
    constexpr double kCap = 1e6;
    double hi = 10.0;

    // The scalar objective is convex in tau; grow the bracket until it is
    // increasing at the right end (minimum interior or at the left end).
    while (ao_objective(hi * (1.0 - 1e-6), sample) >= ao_objective(hi, sample)) {
        hi *= 2.0;
        if (hi > kCap) {
            std::ostringstream msg;
            msg << "ao_solve: objective still decreasing at tau = " << hi / 2.0
                << " (cap " << kCap << "); sigma_sq = " << sample.sigma_sq
                << ", n = " << sample.n;
            throw numerical_failure(msg.str());
        }
    }

    constexpr double kInvPhi = 0.6180339887498948482;
    double a = kLo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = ao_objective(x1, sample);
    double f2 = ao_objective(x2, sample);
    const double width_tol = 1e-10 * std::max(1.0, hi);
    int iterations = 0;
    while (b - a > width_tol) {
        ++iterations;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = ao_objective(x1, sample);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = ao_objective(x2, sample);
        }
    }

    AoSolution sol;
    sol.tau_pre = 0.5 * (a + b);
    sol.tau_hat = sol.tau_pre / std::sqrt(sample.delta);
    sol.iterations = iterations;
    sol.w_tilde = ao_w_from_tau(sol.tau_pre, sample.g.norm(), sample.h);
    const double chi = ao_objective(sol.tau_pre, sample);
    sol.clamp_active = chi < 0.0;
    sol.ao_objective_value = std::max(chi, 0.0);
    long long errors = 0;
    for (Eigen::Index i = 0; i < sol.w_tilde.size(); ++i)
        if (sol.w_tilde(i) <= -1.0) ++errors;
    sol.ao_ber = static_cast<double>(errors) / static_cast<double>(sample.n);
    return sol;
}

}  // namespace boxrel::ao
