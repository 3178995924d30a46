#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "malign/mc_stats.hpp"

using namespace malign;

namespace {

SequenceDistribution point_mass(int k, int m, int letter) {
    SequenceDistribution d;
    d.probs.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (auto& p : d.probs) p[static_cast<std::size_t>(letter)] = 1.0;
    return d;
}

// 50-term Taylor series for Phi(x) around 0, long double; oracle for normal_cdf.
long double phi_series(long double x) {
    long double term = x, sum = x;
    for (int n = 1; n < 50; ++n) {
        term *= -x * x * (2.0L * n - 1) / (2.0L * n * (2.0L * n + 1));
        sum += term;
    }
    return 0.5L + sum / std::sqrt(2.0L * 3.141592653589793238462643L);
}

} // namespace

TEST_CASE("point-mass letters give the deterministic diagonal score") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = point_mass(2, 2, 1);
    Rng rng = Rng::stream(7, 0);
    CHECK(sample_L(model, dist, {12, 12}, rng) == 12);
}

TEST_CASE("same seed, same sample") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    Rng a = Rng::stream(99, 3), b = Rng::stream(99, 3);
    CHECK(sample_L(model, dist, {20, 20}, a) == sample_L(model, dist, {20, 20}, b));
}

TEST_CASE("replicate vector is independent of the worker count") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    const auto one = replicate_L(model, dist, {16, 16}, 5, 40, 1);
    const auto three = replicate_L(model, dist, {16, 16}, 5, 40, 3);
    CHECK(one == three);
    // MALIGN_THREADS caps but must not change values either.
    setenv("MALIGN_THREADS", "2", 1);
    const auto capped = replicate_L(model, dist, {16, 16}, 5, 40, 0);
    unsetenv("MALIGN_THREADS");
    CHECK(one == capped);
}

TEST_CASE("n=5 mean matches exhaustive enumeration within 4 SE") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    // Exhaustive expectation over all 1024 binary sequence pairs.
    double exact = 0.0;
    for (int a = 0; a < 32; ++a)
        for (int b = 0; b < 32; ++b) {
            Instance inst;
            inst.sequences.assign(2, std::vector<int>(5));
            for (int i = 0; i < 5; ++i) {
                inst.sequences[0][static_cast<std::size_t>(i)] = (a >> i) & 1;
                inst.sequences[1][static_cast<std::size_t>(i)] = (b >> i) & 1;
            }
            exact += static_cast<double>(align_exact(inst, model, false).score);
        }
    exact /= 1024.0;

    const auto raw = replicate_L(model, dist, {5, 5}, 123, 4000, 0);
    std::vector<double> xs(raw.begin(), raw.end());
    const double mean = sample_mean(xs);
    const double se = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
    CHECK(std::abs(mean - exact) <= 4.0 * se);
}

TEST_CASE("gamma curve: point-mass letters pin gamma_n at 1") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.replicates = 10;
    cfg.n_grid = {8, 16};
    const GammaCurveReport r = estimate_gamma_curve(model, point_mass(2, 2, 0), cfg);
    for (const auto& p : r.points) {
        CHECK(p.gamma_n == doctest::Approx(1.0));
        CHECK(p.se == doctest::Approx(0.0));
    }
    REQUIRE(r.superadditivity.size() == 1);
    CHECK(r.superadditivity[0].ok);
}

TEST_CASE("gamma curve doubling audit passes on uniform binary words") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 11;
    cfg.replicates = 400;
    cfg.n_grid = {25, 50, 100};
    const GammaCurveReport r =
        estimate_gamma_curve(model, SequenceDistribution::uniform(2, 2), cfg);
    REQUIRE(r.superadditivity.size() == 2);
    for (const auto& a : r.superadditivity) CHECK(a.ok);
    CHECK(r.fit_gamma > r.points.back().gamma_n); // extrapolates above finite-n values
}

TEST_CASE("surface: center point reduces to the curve estimate") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    McConfig cfg;
    cfg.seed = 21;
    cfg.replicates = 300;
    const SurfaceReport r = estimate_gamma_surface(model, dist, 40, {{1.0, 1.0}}, cfg);
    REQUIRE(r.points.size() == 1);
    McConfig curve_cfg = cfg;
    curve_cfg.n_grid = {40};
    const auto curve = estimate_gamma_curve(model, dist, curve_cfg);
    const double joint = 4.0 * std::hypot(r.points[0].se, curve.points[0].se);
    CHECK(std::abs(r.points[0].mean_L - curve.points[0].mean_L) <= joint);
}

TEST_CASE("surface audits on a symmetric grid") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    McConfig cfg;
    cfg.seed = 31;
    cfg.replicates = 300;
    const std::vector<std::vector<double>> grid{
        {0.6, 1.4}, {0.8, 1.2}, {1.0, 1.0}, {1.2, 0.8}, {1.4, 0.6}};
    const SurfaceReport r = estimate_gamma_surface(model, dist, 60, grid, cfg);
    CHECK(r.nearest_center == 2);
    CHECK(r.max_at_center);
    CHECK(r.concavity_ok);
    CHECK(!r.concavity.empty());
    // Swap-symmetric points agree statistically.
    const double tol =
        4.0 * std::hypot(r.points[0].se, r.points[4].se) / 60.0 + 1e-12;
    CHECK(std::abs(r.points[0].gamma_n - r.points[4].gamma_n) <= tol + 0.02);
}

TEST_CASE("unbalanced q sits strictly below the center") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    McConfig cfg;
    cfg.seed = 41;
    cfg.replicates = 400;
    const SurfaceReport r =
        estimate_gamma_surface(model, dist, 100, {{0.2, 1.8}, {1.0, 1.0}}, cfg);
    const double gap = r.points[1].gamma_n - r.points[0].gamma_n;
    CHECK(gap >= 3.0 * std::hypot(r.points[0].se, r.points[1].se) / 100.0);
}

TEST_CASE("bad simplex points rejected") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    McConfig cfg;
    cfg.replicates = 5;
    CHECK_THROWS_AS(estimate_gamma_surface(model, dist, 20, {{0.5, 1.0}}, cfg), Error);
    CHECK_THROWS_AS(estimate_gamma_surface(model, dist, 20, {{0.0, 2.0}}, cfg), Error);
    CHECK_THROWS_AS(estimate_gamma_surface(model, dist, 20, {{1.0, 1.0, 0.0}}, cfg), Error);
}

TEST_CASE("hoeffding: huge deviations never flagged") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.replicates = 200;
    const HoeffdingReport r =
        hoeffding_audit(model, SequenceDistribution::uniform(2, 2), 30, {1e6}, cfg);
    CHECK(r.violations == 0);
    CHECK(r.rows[0].freq_upper == 0.0);
    CHECK(r.rows[0].freq_lower == 0.0);
}

TEST_CASE("hoeffding: point-mass letters are constant, pass trivially") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.replicates = 100;
    const HoeffdingReport r = hoeffding_audit(model, point_mass(2, 2, 0), 20, {1.0, 5.0}, cfg);
    CHECK(r.violations == 0);
    for (const auto& row : r.rows) {
        CHECK(row.freq_upper == 0.0);
        CHECK(row.freq_lower == 0.0);
    }
}

TEST_CASE("hoeffding audit clean on moderate uniform LCS") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 77;
    cfg.replicates = 1000;
    const HoeffdingReport r =
        hoeffding_audit(model, SequenceDistribution::uniform(2, 2), 60, {3, 6, 12}, cfg);
    CHECK(r.violations == 0);
}

TEST_CASE("normal cdf values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(40.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(normal_cdf(-40.0) == doctest::Approx(0.0).epsilon(1e-9));
    for (double x : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        CHECK(normal_cdf(x) == doctest::Approx(static_cast<double>(phi_series(x))).epsilon(1e-9));
        CHECK(normal_cdf(-x) ==
              doctest::Approx(1.0 - static_cast<double>(phi_series(x))).epsilon(1e-9));
    }
    // monotone on a fine grid
    double prev = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.01) {
        const double v = normal_cdf(x);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("empirical dk worked example and degeneracy") {
    const DkResult r = empirical_dk({-1.0, 1.0});
    CHECK(r.dk == doctest::Approx(normal_cdf(1.0) - 0.5).epsilon(1e-12));
    CHECK(r.band == doctest::Approx(std::sqrt(std::log(2.0 / 0.05) / 4.0)));
    try {
        empirical_dk({2.0, 2.0, 2.0});
        FAIL("expected DegenerateVariance");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegenerateVariance);
    }
}

TEST_CASE("dk of true normal samples stays within the DKW band") {
    Rng rng(0xD1CE);
    std::vector<double> xs;
    for (int i = 0; i < 5000; ++i) {
        // Box-Muller
        const double u1 = rng.next_double(), u2 = rng.next_double();
        xs.push_back(std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * 3.14159265358979 * u2));
    }
    const DkResult r = empirical_dk(xs);
    CHECK(r.dk >= 0.0);
    CHECK(r.dk <= 1.0);
    CHECK(r.dk <= r.band);
}

TEST_CASE("clt report flags degenerate models and audits stability") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.replicates = 50;
    const CltSeries degenerate = clt_report(model, point_mass(2, 2, 1), {10, 20}, cfg);
    for (const auto& row : degenerate.rows) CHECK(row.degenerate);

    McConfig cfg2;
    cfg2.seed = 202;
    cfg2.replicates = 800;
    const CltSeries series =
        clt_report(model, SequenceDistribution::uniform(2, 2), {20, 40, 80}, cfg2);
    REQUIRE(series.rows.size() == 3);
    for (const auto& row : series.rows) {
        CHECK_FALSE(row.degenerate);
        CHECK(row.dk_hat >= 0.0);
        CHECK(row.dk_hat <= 1.0);
        CHECK(row.var_hat > 0.0);
    }
    CHECK(series.dk_nonincreasing);
    CHECK(series.var_slope_stable);
}

TEST_CASE("var per n stable across disjoint seed sets") {
    const ScoreModel model = lcs_indicator_model(3, 3);
    McConfig a, b;
    a.seed = 1;
    b.seed = 2;
    a.replicates = b.replicates = 400;
    const CltSeries ra = clt_report(model, SequenceDistribution::uniform(3, 3), {24}, a);
    const CltSeries rb = clt_report(model, SequenceDistribution::uniform(3, 3), {24}, b);
    const double lo = std::min(ra.rows[0].var_per_n, rb.rows[0].var_per_n);
    const double hi = std::max(ra.rows[0].var_per_n, rb.rows[0].var_per_n);
    CHECK(hi / lo <= 1.5);
}
