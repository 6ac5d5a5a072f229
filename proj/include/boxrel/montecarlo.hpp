#pragma once

#include <cstdint>
#include <vector>

#include "boxrel/model.hpp"
#include "boxrel/rng.hpp"
#include "boxrel/theory.hpp"

namespace boxrel::mc {

enum class Path {
    po,  // end-to-end decoder: sample -> solve box LS -> sign -> BER
    ao,  // auxiliary machinery: sample (g, h) -> scalar minimization -> BER
};

/// Protocol for one batch of seeded trials.
struct ExperimentConfig {
    model::ProblemShape shape;
    int trials = 20;
    std::uint64_t master_seed = 0;
    Path path = Path::po;
    double solver_tol = 1e-8;
    int solver_max_iter = 0;  // 0 = solver default (50 n)
    bool force_all_ones_signal = false;
};

/// Aggregated Monte Carlo estimate of the error probability.
struct TrialSummary {
    model::ProblemShape shape;
    int trials = 0;              // requested trials
    long long total_bits = 0;    // included trials * n
    double ber_mean = 0.0;       // mean of per_trial_ber, compensated summation
    double ber_stderr = 0.0;     // sample std of per_trial_ber / sqrt(count)
    double ci_lo = 0.0;          // ber_mean - 1.96 * ber_stderr
    double ci_hi = 0.0;          // ber_mean + 1.96 * ber_stderr
    std::vector<double> per_trial_ber;      // included trials, ascending trial order
    std::vector<double> per_trial_tau_hat;  // ao path only, same order
    int clamp_or_nonconverged = 0;          // excluded trials (counted, warned)
};

// Runs config.trials independent trials; trial t derives all randomness from
// (master_seed, t, purpose) streams, so the summary is bit-identical across
// runs and worker counts (workers honor the BOXREL_THREADS environment
// variable; aggregation is an ordered compensated reduction). Non-converged
// solves and clamped auxiliary samples are excluded with a warning on the
// error channel; more than 10% exclusions raises numerical_failure.
TrialSummary run_trials(const ExperimentConfig& config);

/// Joint k-bit error statistics against the independence prediction Q^k(1/tau*).
struct JointErrorStats {
    int k = 0;
    long long subsets_sampled = 0;          // total (trial, subset) pairs
    double joint_error_freq = 0.0;          // mean over trials of per-trial frequency
    double independence_prediction = 0.0;   // Q(1/tau*)^k
    double std_err = 0.0;                   // over per-trial frequencies
};

// Per-trial kernel: fraction of `subsets` uniformly random k-subsets of
// mask's indices whose bits are all in error. Exposed for direct testing
// with synthetic masks.
double joint_error_freq_from_mask(const std::vector<std::uint8_t>& mask, int k,
                                  int subsets, RngStream& stream);

// Runs the trial loop of `config`, sampling `subsets` random k-subsets per
// trial from the dedicated subset-sampling stream, and aggregates per-trial
// joint frequencies exactly like run_trials aggregates BER. Requires
// 1 <= k <= n and subsets >= 1.
JointErrorStats joint_error_stats(const ExperimentConfig& config, int k, int subsets);

/// One overlay row: simulation next to the theory columns.
struct ComparisonRow {
    double snr_db = 0.0;
    double delta = 0.0;
    int n = 0;
    int trials = 0;
    double ber_mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double pe_theory = 0.0;
    double pe_high_snr = 0.0;
    double pe_mfb = 0.0;
    double tau_star = 0.0;
    double z_score = 0.0;  // (ber_mean - pe_theory) / ber_stderr
};

// Joins a summary with the matching theory point; throws
// std::invalid_argument when (delta, SNR) disagree. z_score is 0 when
// ber_stderr = 0 and the means coincide (degenerate noiseless case).
ComparisonRow compare_to_theory(const TrialSummary& summary, const theory::TheoryPoint& point);

}  // namespace boxrel::mc
