#ifndef MALIGN_STEIN_HPP
#define MALIGN_STEIN_HPP

#include <cstdint>
#include <vector>

#include "malign/aligner.hpp"
#include "malign/rng.hpp"
#include "malign/score_model.hpp"

namespace malign {

/// A concatenated coordinate vector W of m sequences of length n each
/// (sequence-major: coordinate j lives in sequence j/n at offset j%n) together
/// with an independent copy W'. Recombinations W^A swap in W' on the
/// coordinates of A.
struct PairedSample {
    int m = 0;
    int n = 0;
    std::vector<int> w, w_prime; // both of length m*n

    int size() const { return m * n; }
    void validate(const Alphabet& alphabet) const;
    static PairedSample draw(const ScoreModel& model, const SequenceDistribution& dist, int n,
                             Rng& rng);

    /// The m sequences of W^A, where bit j of mask selects W'_j.
    Instance assemble(std::uint32_t mask) const;
};

enum class SteinMode { exact, sampled };

struct SteinEstimate {
    double T = 0.0;       // natural score units squared
    double T_prime = 0.0;
    SteinMode mode = SteinMode::exact;
    std::uint64_t samples_used = 0;
    double se_T = 0.0;       // 0 in exact mode
    double se_T_prime = 0.0;
};

/// Delta_j f(W) = f(W) - f(W^j), with f the optimal alignment score of the m
/// reassembled sequences, in natural units. Coordinates are 0-based, j in
/// [0, mn).
double delta_j(const ScoreModel& model, const PairedSample& paired, int j);

/// T = 1/2 sum_{A strictly subset [mn]} kappa_A sum_{j not in A}
///     Delta_j f(W) * Delta_j f(W^A),  kappa_A = 1 / (C(mn,|A|) (mn-|A|));
/// T' takes |Delta_j f(W^A)| in the second factor. Integer fixed-point
/// accumulation per subset size, one exact division per size. Needs mn <= 14.
SteinEstimate stein_exact(const ScoreModel& model, const PairedSample& paired);

/// Unbiased sampler for the same sums: draw a ~ U{0..mn-1}, A uniform among
/// size-a subsets, j uniform outside A; then T = (mn/2) E[Delta_j f(W)
/// Delta_j f(W^A)]. Returns the scaled sample means with standard errors.
SteinEstimate stein_sampled(const ScoreModel& model, const PairedSample& paired,
                            std::uint64_t samples, Rng& rng);

/// sum over all strict subsets A of [N] of kappa_A * (N - |A|), enumerated
/// mask by mask; analytically equal to N.
double kappa_normalization(int N);

struct BoundConfig {
    int n = 0;
    int outer_reps = 0;
    int inner_samples = 0;
    int sigma_reps = 2000; // separate replicate set for the variance estimate
    std::uint64_t seed = 1;
    int workers = 0;

    void validate() const;
};

struct BoundTerm {
    double value = 0.0;
    double se = 0.0;
};

struct BoundReport {
    BoundTerm term_varT;      // sqrt(Var E(T|W)) / sigma^2
    BoundTerm term_varTprime; // sqrt(Var E(T'|W)) / sigma^2
    BoundTerm term_sixth;     // sum_j sqrt(E|Delta_j f|^6) / (4 sigma^3)
    BoundTerm term_third;     // sqrt(2 pi)/16 * sum_j sqrt(E|Delta_j f|^3) / sigma^3
    double total = 0.0;
    double sigma2 = 0.0;
};

/// Nested Monte Carlo plug-in for the four normal-approximation bound terms:
/// the outer loop draws W, the inner loop samples fresh (W', A, j) per term;
/// variance across outer means estimates Var(E(T|W)). Throws
/// DegenerateVariance when the replicate-set variance of L is zero.
BoundReport bound_report(const ScoreModel& model, const SequenceDistribution& dist,
                         const BoundConfig& cfg);

} // namespace malign

#endif
