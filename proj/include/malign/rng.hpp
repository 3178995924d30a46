#ifndef MALIGN_RNG_HPP
#define MALIGN_RNG_HPP

#include <cstdint>
#include <vector>

namespace malign {

/// Counter-based generator (splitmix64 finalizer over key + counter): replicate
/// streams are reproducible independently of worker scheduling and platform.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    /// Stream for replicate i of a seeded run.
    static Rng stream(std::uint64_t seed, std::uint64_t replicate) {
        return Rng(seed ^ (replicate * 0x9E3779B97F4A7C15ull) ^ replicate);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + counter_++ * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) without modulo bias worth worrying about
    /// at desk-scale bounds.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
    }

    /// Category sample by CDF inversion.
    int next_category(const std::vector<double>& probs) {
        const double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace malign

#endif
