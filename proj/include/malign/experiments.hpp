#ifndef MALIGN_EXPERIMENTS_HPP
#define MALIGN_EXPERIMENTS_HPP

#include <cstdint>
#include <vector>

#include "malign/aligner.hpp"
#include "malign/rng.hpp"

namespace malign {

/// L_{i,j} = max{L_{i-1,j}, L_{i,j-1}, L_{i-1,j-1} + S_{i,j}} with zero
/// borders; returns L_{n,n}. The field must be square.
score_t bm_recursion(const std::vector<std::vector<score_t>>& field);

enum class BmMode { dependent, independent };

struct BmConfig {
    int n = 0;
    BmMode mode = BmMode::dependent;
    double p = 0.5;   // match probability of the indicator field
    int alphabet = 2; // dependent mode: uniform letters on this alphabet
    int replicates = 1;
    std::uint64_t seed = 1;
    int workers = 0;

    void validate() const;
};

struct BmReport {
    BmConfig cfg;
    double mean_L = 0.0;
    double se = 0.0;
    double skewness = 0.0;
    std::vector<score_t> samples;
};

/// Dependent mode scores S_{i,j} = 1{X_i = Y_j} for uniform letters matched so
/// that P(X_i = Y_j) = p; independent mode draws the field entries i.i.d.
/// Bernoulli(p) directly.
BmReport run_bm(const BmConfig& cfg);

struct PermConfig {
    int n = 0;
    double c = 0.0; // window in index units
    int replicates = 1;
    std::uint64_t seed = 1;
    bool literal_formula = false; // see perm_score_L
    int workers = 0;

    void validate() const;
};

/// Alignment score of two given permutations under the windowed score below;
/// raw value in units of 1/(n-1).
score_t perm_L_given(const std::vector<int>& pi, const std::vector<int>& rho, double c,
                     bool literal_formula);

/// One draw: uniform permutations pi, rho of [n]; alignment score under
/// S(a,b) = (1 - |a-b|/(n-1)) * 1{|a-b| <= c}, computed exactly over the
/// integer grid with denominator n-1. With literal_formula the score reads
/// 1 - (|a-b|/(n-1)) * 1{|a-b| <= c} instead (constant 1 at c = 0).
/// Returned in units of 1/(n-1): raw value / (n-1) is the natural score.
score_t perm_score_L(const PermConfig& cfg, Rng& rng);

struct PermReport {
    PermConfig cfg;
    double mean_L = 0.0; // natural units
    double se = 0.0;
    double mean_over_sqrt_n = 0.0;
    std::vector<score_t> samples; // raw, units of 1/(n-1)
};

PermReport run_perm(const PermConfig& cfg);

/// Longest increasing subsequence length by patience sorting, O(n log n).
/// Input must be a permutation of 0..n-1.
int lis_oracle(const std::vector<int>& perm);

/// rho^{-1} o pi as a permutation of 0..n-1; its longest increasing
/// subsequence length equals the common-subsequence length of pi and rho.
std::vector<int> compose_inverse(const std::vector<int>& rho, const std::vector<int>& pi);

/// Uniform permutation of 0..n-1 by Fisher-Yates.
std::vector<int> random_permutation(int n, Rng& rng);

} // namespace malign

#endif
