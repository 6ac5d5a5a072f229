#include "boxrel/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "boxrel/ao.hpp"
#include "boxrel/boxsolve.hpp"
#include "boxrel/errors.hpp"

namespace boxrel::mc {

namespace {

// Compensated (Kahan) accumulator: with the fixed ascending-trial order this
// makes every aggregate bit-identical across worker counts.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct Moments {
    double mean = 0.0;
    double std_err = 0.0;
};

Moments ordered_moments(const std::vector<double>& values) {
    Moments mo;
    if (values.empty()) return mo;
    Kahan s;
    for (double v : values) s.add(v);
    mo.mean = s.sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        Kahan sq;
        for (double v : values) sq.add((v - mo.mean) * (v - mo.mean));
        const double var = sq.sum / static_cast<double>(values.size() - 1);
        mo.std_err = std::sqrt(var / static_cast<double>(values.size()));
    }
    return mo;
}

int worker_count(int trials) {
    int workers = 0;
    if (const char* env = std::getenv("BOXREL_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0 && parsed < 1024) workers = static_cast<int>(parsed);
    }
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    return std::min(workers, std::max(1, trials));
}

struct Outcome {
    double ber = 0.0;
    double tau_hat = 0.0;
    double joint = 0.0;
    bool ok = false;
};

void check_config(const ExperimentConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (!(config.solver_tol > 0.0))
        throw std::invalid_argument("run_trials: solver_tol must be > 0");
    if (config.shape.n < 1 || config.shape.m < 1)
        throw std::invalid_argument("run_trials: invalid shape");
}

// Runs all trials (k = 0 skips the joint-error machinery). Each trial draws
// only from streams keyed by (master_seed, trial, purpose), so the outcome
// vector is a pure function of the config no matter how work is scheduled.
std::vector<Outcome> run_engine(const ExperimentConfig& config, int k, int subsets) {
    check_config(config);
    std::vector<Outcome> outcomes(static_cast<std::size_t>(config.trials));

    auto run_one = [&](int t) {
        const StreamKey key{config.master_seed, static_cast<std::uint64_t>(t)};
        Outcome& out = outcomes[static_cast<std::size_t>(t)];
        if (config.path == Path::po) {
            const model::ChannelInstance inst =
                model::sample_instance(config.shape, key, config.force_all_ones_signal);
            try {
                const solve::BoxSolution sol = solve::solve_box_ls(
                    inst.A, inst.y, config.solver_tol, config.solver_max_iter);
                const solve::DetectionResult det =
                    solve::bit_error_rate(solve::detect_signs(sol.x_hat), inst.x0);
                out.ber = det.ber;
                out.ok = true;
                if (k > 0) {
                    RngStream subset_stream(key, StreamPurpose::subset_sampling);
                    out.joint = joint_error_freq_from_mask(det.error_mask, k, subsets,
                                                           subset_stream);
                }
            } catch (const solve::non_convergence&) {
                out.ok = false;
            }
        } else {
            const ao::AoSample sample = ao::sample_ao(config.shape, key);
            try {
                const ao::AoSolution sol = ao::ao_solve(sample);
                if (sol.clamp_active) {
                    out.ok = false;  // objective clamped at zero: tau_hat ill-defined
                    return;
                }
                out.ber = sol.ao_ber;
                out.tau_hat = sol.tau_hat;
                out.ok = true;
                if (k > 0) {
                    std::vector<std::uint8_t> mask(static_cast<std::size_t>(config.shape.n));
                    for (int i = 0; i < config.shape.n; ++i)
                        mask[static_cast<std::size_t>(i)] = sol.w_tilde(i) <= -1.0 ? 1 : 0;
                    RngStream subset_stream(key, StreamPurpose::subset_sampling);
                    out.joint = joint_error_freq_from_mask(mask, k, subsets, subset_stream);
                }
            } catch (const numerical_failure&) {
                out.ok = false;
            }
        }
    };

    const int workers = worker_count(config.trials);
    if (workers == 1) {
        for (int t = 0; t < config.trials; ++t) run_one(t);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= config.trials) return;
                try {
                    run_one(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return outcomes;
}

int count_excluded(const std::vector<Outcome>& outcomes) {
    int excluded = 0;
    for (const Outcome& o : outcomes)
        if (!o.ok) ++excluded;
    return excluded;
}

void report_exclusions(const ExperimentConfig& config, int excluded) {
    if (excluded == 0) return;
    std::cerr << "warning: excluded " << excluded << " of " << config.trials
              << " trials (non-converged solve or clamped auxiliary objective)\n";
    if (10 * excluded > config.trials) {
        std::ostringstream msg;
        msg << "aggregate failure: " << excluded << " of " << config.trials
            << " trials excluded (more than 10%)";
        throw numerical_failure(msg.str());
    }
}

}  // namespace

TrialSummary run_trials(const ExperimentConfig& config) {
    const std::vector<Outcome> outcomes = run_engine(config, 0, 0);
    const int excluded = count_excluded(outcomes);
    report_exclusions(config, excluded);

    TrialSummary summary;
    summary.shape = config.shape;
    summary.trials = config.trials;
    summary.clamp_or_nonconverged = excluded;
    summary.per_trial_ber.reserve(outcomes.size());
    for (const Outcome& o : outcomes) {  // ascending trial order
        if (!o.ok) continue;
        summary.per_trial_ber.push_back(o.ber);
        if (config.path == Path::ao) summary.per_trial_tau_hat.push_back(o.tau_hat);
    }
    summary.total_bits =
        static_cast<long long>(summary.per_trial_ber.size()) * config.shape.n;
    const Moments mo = ordered_moments(summary.per_trial_ber);
    summary.ber_mean = mo.mean;
    summary.ber_stderr = mo.std_err;
    summary.ci_lo = summary.ber_mean - 1.96 * summary.ber_stderr;
    summary.ci_hi = summary.ber_mean + 1.96 * summary.ber_stderr;
    return summary;
}

double joint_error_freq_from_mask(const std::vector<std::uint8_t>& mask, int k, int subsets,
                                  RngStream& stream) {
    const std::uint64_t n = mask.size();
    if (k < 1 || static_cast<std::uint64_t>(k) > n)
        throw std::invalid_argument("joint_error_freq_from_mask: need 1 <= k <= n");
    if (subsets < 1) throw std::invalid_argument("joint_error_freq_from_mask: subsets >= 1");

    long long hits = 0;
    std::vector<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    for (int s = 0; s < subsets; ++s) {
        // Floyd's algorithm: a uniformly random k-subset of {0, ..., n-1}.
        chosen.clear();
        for (std::uint64_t j = n - static_cast<std::uint64_t>(k); j < n; ++j) {
            const std::uint64_t pick = stream.next_below(j + 1);
            bool dup = false;
            for (std::uint64_t c : chosen)
                if (c == pick) dup = true;
            chosen.push_back(dup ? j : pick);
        }
        bool all_err = true;
        for (std::uint64_t c : chosen)
            if (!mask[static_cast<std::size_t>(c)]) all_err = false;
        if (all_err) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(subsets);
}

JointErrorStats joint_error_stats(const ExperimentConfig& config, int k, int subsets) {
    if (k < 1 || k > config.shape.n)
        throw std::invalid_argument("joint_error_stats: need 1 <= k <= n");
    if (subsets < 1) throw std::invalid_argument("joint_error_stats: subsets must be >= 1");

    const std::vector<Outcome> outcomes = run_engine(config, k, subsets);
    const int excluded = count_excluded(outcomes);
    report_exclusions(config, excluded);

    std::vector<double> per_trial;
    per_trial.reserve(outcomes.size());
    for (const Outcome& o : outcomes)
        if (o.ok) per_trial.push_back(o.joint);

    JointErrorStats stats;
    stats.k = k;
    stats.subsets_sampled = static_cast<long long>(per_trial.size()) * subsets;
    const Moments mo = ordered_moments(per_trial);
    stats.joint_error_freq = mo.mean;
    stats.std_err = mo.std_err;
    const theory::TheoryPoint point = theory::predict_pe(config.shape.delta, config.shape.snr);
    stats.independence_prediction = std::pow(point.pe, k);
    return stats;
}

ComparisonRow compare_to_theory(const TrialSummary& summary, const theory::TheoryPoint& point) {
    if (std::abs(summary.shape.delta - point.delta) > 1e-12)
        throw std::invalid_argument("compare_to_theory: delta mismatch");
    const bool both_noiseless = summary.shape.sigma_sq == 0.0 && std::isinf(point.snr);
    if (!both_noiseless) {
        const double rel =
            std::abs(summary.shape.snr - point.snr) / std::max(point.snr, 1e-300);
        if (!(rel <= 1e-9)) throw std::invalid_argument("compare_to_theory: snr mismatch");
    }

    ComparisonRow row;
    row.snr_db = summary.shape.snr_db;
    row.delta = point.delta;
    row.n = summary.shape.n;
    row.trials = summary.trials;
    row.ber_mean = summary.ber_mean;
    row.ci_lo = summary.ci_lo;
    row.ci_hi = summary.ci_hi;
    row.pe_theory = point.pe;
    row.pe_high_snr = point.pe_high_snr;
    row.pe_mfb = point.pe_mfb;
    row.tau_star = point.tau_star;
    if (summary.ber_stderr > 0.0) {
        row.z_score = (summary.ber_mean - point.pe) / summary.ber_stderr;
    } else {
        row.z_score = summary.ber_mean == point.pe
                          ? 0.0
                          : std::copysign(std::numeric_limits<double>::infinity(),
                                          summary.ber_mean - point.pe);
    }
    return row;
}

}  // namespace boxrel::mc
