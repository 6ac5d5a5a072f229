#include "boxrel/model.hpp"

#include <cmath>
#include <stdexcept>

namespace boxrel::model {

ProblemShape make_shape(int n, double delta, double snr_db) {
    if (n < 1) throw std::invalid_argument("make_shape: n must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("make_shape: delta must be > 0");
    if (std::isnan(snr_db)) throw std::invalid_argument("make_shape: snr_db must not be NaN");

    ProblemShape shape;
    shape.n = n;
    shape.delta = delta;
    shape.m = static_cast<int>(std::llround(delta * n));
    if (shape.m < 1) shape.m = 1;
    shape.snr_db = snr_db;
    // +inf dB -> sigma_sq = 0 (noiseless), snr = +inf.
    shape.sigma_sq = std::pow(10.0, -snr_db / 10.0);
    shape.snr = std::pow(10.0, snr_db / 10.0);
    return shape;
}

ChannelInstance sample_instance(const ProblemShape& shape, const StreamKey& key,
                                bool force_all_ones) {
    if (shape.n < 1 || shape.m < 1)
        throw std::invalid_argument("sample_instance: invalid shape");

    const int n = shape.n;
    const int m = shape.m;
    ChannelInstance inst;

    RngStream channel(key, StreamPurpose::channel);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    inst.A.resize(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) inst.A(i, j) = channel.next_gaussian() * scale;

    RngStream signal(key, StreamPurpose::signal);
    inst.x0.resize(n);
    if (force_all_ones) {
        inst.x0.setOnes();
    } else {
        for (int i = 0; i < n; ++i) inst.x0(i) = signal.next_sign();
    }

    RngStream noise(key, StreamPurpose::noise);
    inst.z.resize(m);
    if (shape.sigma_sq == 0.0) {
        inst.z.setZero();
    } else {
        const double sigma = std::sqrt(shape.sigma_sq);
        for (int i = 0; i < m; ++i) inst.z(i) = noise.next_gaussian() * sigma;
    }

    inst.y = inst.A * inst.x0;
    inst.y += inst.z;
    return inst;
}

double construction_residual(const ChannelInstance& inst) {
    // Same product and addition order as the constructor, so the identity is
    // exact, not merely small.
    Eigen::VectorXd rhs = inst.A * inst.x0;
    rhs += inst.z;
    return (inst.y - rhs).cwiseAbs().maxCoeff();
}

ChannelInstance relabel_signs(const ChannelInstance& inst, const Eigen::VectorXd& signs) {
    if (signs.size() != inst.x0.size())
        throw std::invalid_argument("relabel_signs: sign vector length mismatch");
    for (Eigen::Index i = 0; i < signs.size(); ++i)
        if (signs(i) != 1.0 && signs(i) != -1.0)
            throw std::invalid_argument("relabel_signs: entries must be +1 or -1");

    ChannelInstance out;
    out.A = inst.A * signs.asDiagonal();
    out.x0 = inst.x0.cwiseProduct(signs);
    out.z = inst.z;
    out.y = inst.y;  // A D (D x0) + z = A x0 + z
    return out;
}

}  // namespace boxrel::model
