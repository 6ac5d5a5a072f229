#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace boxrel {

enum class StreamPurpose : std::uint64_t {
    channel = 1,
    noise = 2,
    signal = 3,
    subset_sampling = 4,
};

// Identifies the (seed, trial) pair all purpose streams of one trial derive from.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

/// Deterministic random stream keyed by (master_seed, trial_index, purpose).
/// Equal keys give bit-identical sequences; distinct keys give streams that
/// are independent for experiment purposes. Gaussian variates come from the
/// Marsaglia polar method so the output does not depend on the standard
/// library's unspecified std::normal_distribution algorithm.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t trial_index, StreamPurpose purpose)
        : engine_(mix(master_seed, trial_index, static_cast<std::uint64_t>(purpose))) {}

    RngStream(const StreamKey& key, StreamPurpose purpose)
        : RngStream(key.master_seed, key.trial_index, purpose) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal, exact polar method
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // uniform integer in [0, bound), rejection sampling, unbiased
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform on {-1, +1}
    double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

private:
    static std::uint64_t splitmix(std::uint64_t& state) {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose) {
        std::uint64_t state = seed;
        std::uint64_t out = splitmix(state);
        state ^= trial * 0xD1B54A32D192ED03ull;
        out ^= splitmix(state);
        state ^= purpose * 0x8CB92BA72F3D8DD7ull;
        out ^= splitmix(state);
        return out;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace boxrel
