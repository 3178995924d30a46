#ifndef MALIGN_MC_STATS_HPP
#define MALIGN_MC_STATS_HPP

#include <cstdint>
#include <vector>

#include "malign/aligner.hpp"
#include "malign/rng.hpp"
#include "malign/score_model.hpp"

namespace malign {

struct McConfig {
    std::uint64_t seed = 1;
    int replicates = 1000;
    std::vector<int> n_grid;
    int workers = 0; // 0 = auto (MALIGN_THREADS or hardware)

    void validate() const;
};

int resolve_workers(int requested);

/// Draws m sequences (i.i.d. within each, independent across) and returns the
/// exact optimal score.
score_t sample_L(const ScoreModel& model, const SequenceDistribution& dist,
                 const std::vector<int>& lengths, Rng& rng);

Instance draw_instance(const ScoreModel& model, const SequenceDistribution& dist,
                       const std::vector<int>& lengths, Rng& rng);

/// Replicated sample_L with counter-based per-replicate streams; the result
/// vector is ordered by replicate index and bitwise independent of the worker
/// count.
std::vector<score_t> replicate_L(const ScoreModel& model, const SequenceDistribution& dist,
                                 const std::vector<int>& lengths, std::uint64_t seed,
                                 int replicates, int workers);

struct GammaEstimate {
    int n = 0;
    double mean_L = 0.0; // natural score units
    double se = 0.0;
    double gamma_n = 0.0;
    std::vector<double> q; // surface coordinate, empty for the curve
};

struct DoublingAudit {
    int n = 0;
    double mean_2n = 0.0;
    double twice_mean_n = 0.0;
    double pooled_se = 0.0;
    bool ok = false; // mean_2n >= 2*mean_n - 3*pooled_se
};

struct GammaCurveReport {
    std::vector<GammaEstimate> points;
    std::vector<DoublingAudit> superadditivity;
    double fit_gamma = 0.0; // gamma_n ~ fit_gamma - fit_c*sqrt(ln n / n)
    double fit_c = 0.0;
};

GammaCurveReport estimate_gamma_curve(const ScoreModel& model, const SequenceDistribution& dist,
                                      const McConfig& cfg);

struct ConcavityCheck {
    std::size_t left = 0, right = 0, mid = 0;
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    bool ok = false;
};

struct SurfaceReport {
    std::vector<GammaEstimate> points;
    std::size_t argmax = 0;
    std::size_t nearest_center = 0;
    bool max_at_center = false;
    std::vector<ConcavityCheck> concavity;
    bool concavity_ok = true;
};

SurfaceReport estimate_gamma_surface(const ScoreModel& model, const SequenceDistribution& dist,
                                     int n, const std::vector<std::vector<double>>& q_grid,
                                     const McConfig& cfg);

struct HoeffdingRow {
    double t = 0.0;
    double bound = 0.0;
    double freq_upper = 0.0;
    double freq_lower = 0.0;
    bool flagged_upper = false;
    bool flagged_lower = false;
};

struct HoeffdingReport {
    int n = 0;
    int replicates = 0;
    std::vector<HoeffdingRow> rows;
    int violations = 0;
};

/// Empirical tail frequencies of |L - mean| against exp(-2t^2/(n*sum D_j^2)),
/// flagged by a one-sided exact binomial test at the 99% level.
HoeffdingReport hoeffding_audit(const ScoreModel& model, const SequenceDistribution& dist, int n,
                                const std::vector<double>& t_grid, const McConfig& cfg);

/// Standard normal CDF via the complementary error function; clamped to [0,1].
double normal_cdf(double x);

struct DkResult {
    double dk = 0.0;
    double band = 0.0; // DKW 95%
};

/// Kolmogorov distance of the standardized empirical CDF to the standard
/// normal. Standardization uses the sample mean and the population-style
/// (1/N) standard deviation of the inputs.
DkResult empirical_dk(std::vector<double> samples);

struct CltReport {
    int n = 0;
    bool degenerate = false;
    double var_hat = 0.0; // natural units, unbiased sample variance
    double var_per_n = 0.0;
    double dk_hat = 0.0;
    double dk_band = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool c_star_check = false;
};

struct CltSeries {
    std::vector<CltReport> rows;
    double c_star = 0.0;
    bool dk_nonincreasing = true; // along the grid, within summed DKW bands
    bool var_slope_stable = true; // var/n within +-50% across the grid
};

CltSeries clt_report(const ScoreModel& model, const SequenceDistribution& dist,
                     const std::vector<int>& n_grid, const McConfig& cfg, double c_star = 0.01);

// Plain moment helpers over an ordered sample (deterministic summation order).
double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs); // unbiased, 0 for size < 2

} // namespace malign

#endif
