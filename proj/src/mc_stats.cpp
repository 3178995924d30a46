#include "malign/mc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace malign {

void McConfig::validate() const {
    if (replicates < 1) throw Error(Errc::BadConfig, "replicates must be >= 1");
}

int resolve_workers(int requested) {
    int w = requested;
    if (const char* env = std::getenv("MALIGN_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) w = (w > 0) ? std::min(w, cap) : cap;
    }
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, w);
}

Instance draw_instance(const ScoreModel& model, const SequenceDistribution& dist,
                       const std::vector<int>& lengths, Rng& rng) {
    dist.validate(model.alphabet());
    if (static_cast<int>(lengths.size()) != model.arity() ||
        static_cast<int>(dist.probs.size()) != model.arity())
        throw Error(Errc::ArityMismatch, "lengths/distribution arity mismatch");
    Instance inst;
    inst.sequences.resize(lengths.size());
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        auto& seq = inst.sequences[j];
        seq.reserve(static_cast<std::size_t>(lengths[j]));
        for (int i = 0; i < lengths[j]; ++i) seq.push_back(rng.next_category(dist.probs[j]));
    }
    return inst;
}

score_t sample_L(const ScoreModel& model, const SequenceDistribution& dist,
                 const std::vector<int>& lengths, Rng& rng) {
    const Instance inst = draw_instance(model, dist, lengths, rng);
    return align_exact(inst, model, false).score;
}

std::vector<score_t> replicate_L(const ScoreModel& model, const SequenceDistribution& dist,
                                 const std::vector<int>& lengths, std::uint64_t seed,
                                 int replicates, int workers) {
    std::vector<score_t> out(static_cast<std::size_t>(replicates), 0);
    const int nw = std::min(resolve_workers(workers), replicates);
    auto work = [&](int worker) {
        for (int i = worker; i < replicates; i += nw) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = sample_L(model, dist, lengths, rng);
        }
    };
    if (nw == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    return out;
}

double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return s / static_cast<double>(xs.size() - 1);
}

namespace {

std::vector<double> to_natural(const std::vector<score_t>& raw, score_t scale) {
    std::vector<double> xs;
    xs.reserve(raw.size());
    for (score_t v : raw) xs.push_back(static_cast<double>(v) / static_cast<double>(scale));
    return xs;
}

double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double central_moment(const std::vector<double>& xs, int p) {
    const double mu = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += std::pow(x - mu, p);
    return s / static_cast<double>(xs.size());
}

/// log C(n,k) + k log p + (n-k) log(1-p), summed for the upper tail.
double binom_upper_tail(int n, int k, double p) {
    if (k <= 0) return 1.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double tail = 0.0;
    double lp = std::log(p), lq = std::log1p(-p);
    for (int i = k; i <= n; ++i) {
        const double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        tail += std::exp(lc + i * lp + (n - i) * lq);
        if (tail > 1.0) return 1.0;
    }
    return tail;
}

} // namespace

GammaCurveReport estimate_gamma_curve(const ScoreModel& model, const SequenceDistribution& dist,
                                      const McConfig& cfg) {
    cfg.validate();
    if (cfg.n_grid.empty()) throw Error(Errc::BadConfig, "n_grid must be nonempty");
    GammaCurveReport report;
    const double scale = static_cast<double>(model.scale());
    for (int n : cfg.n_grid) {
        const std::vector<int> lengths(static_cast<std::size_t>(model.arity()), n);
        const auto raw = replicate_L(model, dist, lengths, cfg.seed ^ static_cast<std::uint64_t>(n),
                                     cfg.replicates, cfg.workers);
        const auto xs = to_natural(raw, model.scale());
        GammaEstimate g;
        g.n = n;
        g.mean_L = sample_mean(xs);
        g.se = standard_error(xs);
        g.gamma_n = g.mean_L / n;
        report.points.push_back(g);
        (void)scale;
    }

    // Superadditivity audit over doubling pairs present in the grid.
    for (const auto& a : report.points)
        for (const auto& b : report.points)
            if (b.n == 2 * a.n) {
                DoublingAudit d;
                d.n = a.n;
                d.mean_2n = b.mean_L;
                d.twice_mean_n = 2.0 * a.mean_L;
                d.pooled_se = std::sqrt(b.se * b.se + 4.0 * a.se * a.se);
                d.ok = d.mean_2n >= d.twice_mean_n - 3.0 * d.pooled_se;
                report.superadditivity.push_back(d);
            }

    // Least squares for gamma_n = g - c*sqrt(ln n / n).
    if (report.points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(report.points.size());
        for (const auto& p : report.points) {
            const double x = std::sqrt(std::log(static_cast<double>(p.n)) / p.n);
            sx += x;
            sy += p.gamma_n;
            sxx += x * x;
            sxy += x * p.gamma_n;
        }
        const double denom = k * sxx - sx * sx;
        if (std::abs(denom) > 1e-12) {
            report.fit_c = -(k * sxy - sx * sy) / denom;
            report.fit_gamma = (sy + report.fit_c * sx) / k;
        }
    }
    return report;
}

SurfaceReport estimate_gamma_surface(const ScoreModel& model, const SequenceDistribution& dist,
                                     int n, const std::vector<std::vector<double>>& q_grid,
                                     const McConfig& cfg) {
    cfg.validate();
    const int m = model.arity();
    SurfaceReport report;
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
        const auto& q = q_grid[qi];
        if (static_cast<int>(q.size()) != m) throw Error(Errc::BadSimplexPoint, "q arity mismatch");
        double sum = 0.0;
        for (double v : q) {
            if (v <= 0.0) throw Error(Errc::BadSimplexPoint, "q components must be positive");
            sum += v;
        }
        if (std::abs(sum - m) > 1e-9)
            throw Error(Errc::BadSimplexPoint, "q components must sum to m");

        std::vector<int> lengths;
        for (double v : q) lengths.push_back(std::max(1, static_cast<int>(std::ceil(n * v - 1e-12))));
        const auto raw = replicate_L(model, dist, lengths,
                                     cfg.seed ^ (0x5151u + static_cast<std::uint64_t>(qi) * 977u),
                                     cfg.replicates, cfg.workers);
        const auto xs = to_natural(raw, model.scale());
        GammaEstimate g;
        g.n = n;
        g.q = q;
        g.mean_L = sample_mean(xs);
        g.se = standard_error(xs);
        g.gamma_n = g.mean_L / n;
        report.points.push_back(g);
    }
    if (report.points.empty()) return report;

    auto dist_to_center = [&](const GammaEstimate& g) {
        double s = 0.0;
        for (double v : g.q) s += (v - 1.0) * (v - 1.0);
        return s;
    };
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        if (report.points[i].gamma_n > report.points[report.argmax].gamma_n) report.argmax = i;
        if (dist_to_center(report.points[i]) < dist_to_center(report.points[report.nearest_center]))
            report.nearest_center = i;
    }
    {
        const auto& best = report.points[report.argmax];
        const auto& center = report.points[report.nearest_center];
        const double joint = std::sqrt(best.se * best.se + center.se * center.se) / n;
        report.max_at_center = center.gamma_n >= best.gamma_n - 3.0 * joint;
    }

    // Midpoint concavity on grid-representable segment triples.
    for (std::size_t a = 0; a < report.points.size(); ++a)
        for (std::size_t b = a + 1; b < report.points.size(); ++b)
            for (std::size_t c = 0; c < report.points.size(); ++c) {
                bool mid = true;
                for (int j = 0; j < m; ++j)
                    mid = mid && std::abs(report.points[c].q[static_cast<std::size_t>(j)] -
                                          0.5 * (report.points[a].q[static_cast<std::size_t>(j)] +
                                                 report.points[b].q[static_cast<std::size_t>(j)])) < 1e-9;
                if (!mid || c == a || c == b) continue;
                ConcavityCheck chk;
                chk.left = a;
                chk.right = b;
                chk.mid = c;
                chk.lhs = report.points[c].gamma_n;
                chk.rhs = 0.5 * (report.points[a].gamma_n + report.points[b].gamma_n);
                const double se2 = report.points[c].se * report.points[c].se +
                                   0.25 * (report.points[a].se * report.points[a].se +
                                           report.points[b].se * report.points[b].se);
                chk.slack = 3.0 * std::sqrt(se2) / n;
                chk.ok = chk.lhs >= chk.rhs - chk.slack;
                report.concavity_ok = report.concavity_ok && chk.ok;
                report.concavity.push_back(chk);
            }
    return report;
}

HoeffdingReport hoeffding_audit(const ScoreModel& model, const SequenceDistribution& dist, int n,
                                const std::vector<double>& t_grid, const McConfig& cfg) {
    cfg.validate();
    for (double t : t_grid)
        if (t <= 0.0) throw Error(Errc::BadConfig, "t_grid values must be positive");

    const std::vector<int> lengths(static_cast<std::size_t>(model.arity()), n);
    const auto raw = replicate_L(model, dist, lengths, cfg.seed, cfg.replicates, cfg.workers);
    const auto xs = to_natural(raw, model.scale());
    const double mean = sample_mean(xs);

    double sum_dj2 = 0.0;
    for (score_t dj : model.d_coords()) {
        const double d = static_cast<double>(dj) / static_cast<double>(model.scale());
        sum_dj2 += d * d;
    }

    HoeffdingReport report;
    report.n = n;
    report.replicates = cfg.replicates;
    const int R = cfg.replicates;
    for (double t : t_grid) {
        HoeffdingRow row;
        row.t = t;
        row.bound = std::exp(-2.0 * t * t / (n * sum_dj2));
        int up = 0, down = 0;
        for (double x : xs) {
            if (x - mean >= t) ++up;
            if (x - mean <= -t) ++down;
        }
        row.freq_upper = static_cast<double>(up) / R;
        row.freq_lower = static_cast<double>(down) / R;
        row.flagged_upper = binom_upper_tail(R, up, std::min(1.0, row.bound)) < 0.01;
        row.flagged_lower = binom_upper_tail(R, down, std::min(1.0, row.bound)) < 0.01;
        if (row.flagged_upper) ++report.violations;
        if (row.flagged_lower) ++report.violations;
        report.rows.push_back(row);
    }
    return report;
}

double normal_cdf(double x) {
    const double v = 0.5 * std::erfc(-x / std::sqrt(2.0));
    return std::clamp(v, 0.0, 1.0);
}

DkResult empirical_dk(std::vector<double> samples) {
    const std::size_t N = samples.size();
    if (N < 2) throw Error(Errc::BadConfig, "need at least two samples");
    const double mu = sample_mean(samples);
    double var = 0.0;
    for (double x : samples) var += (x - mu) * (x - mu);
    var /= static_cast<double>(N);
    if (var <= 0.0) throw Error(Errc::DegenerateVariance, "sample standard deviation is zero");
    const double sd = std::sqrt(var);
    for (double& x : samples) x = (x - mu) / sd;
    std::sort(samples.begin(), samples.end());
    DkResult res;
    for (std::size_t i = 1; i <= N; ++i) {
        const double phi = normal_cdf(samples[i - 1]);
        res.dk = std::max(res.dk, std::abs(static_cast<double>(i) / N - phi));
        res.dk = std::max(res.dk, std::abs(static_cast<double>(i - 1) / N - phi));
    }
    res.band = std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(N)));
    return res;
}

CltSeries clt_report(const ScoreModel& model, const SequenceDistribution& dist,
                     const std::vector<int>& n_grid, const McConfig& cfg, double c_star) {
    cfg.validate();
    CltSeries series;
    series.c_star = c_star;
    for (int n : n_grid) {
        const std::vector<int> lengths(static_cast<std::size_t>(model.arity()), n);
        const auto raw = replicate_L(model, dist, lengths, cfg.seed ^ static_cast<std::uint64_t>(n),
                                     cfg.replicates, cfg.workers);
        const auto xs = to_natural(raw, model.scale());
        CltReport row;
        row.n = n;
        row.var_hat = sample_variance(xs);
        row.var_per_n = row.var_hat / n;
        const double m2 = central_moment(xs, 2);
        if (m2 <= 0.0) {
            row.degenerate = true;
        } else {
            const DkResult dk = empirical_dk(xs);
            row.dk_hat = dk.dk;
            row.dk_band = dk.band;
            row.skewness = central_moment(xs, 3) / std::pow(m2, 1.5);
            row.excess_kurtosis = central_moment(xs, 4) / (m2 * m2) - 3.0;
        }
        row.c_star_check = row.var_hat >= c_star * n;
        series.rows.push_back(row);
    }
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        const auto& a = series.rows[i - 1];
        const auto& b = series.rows[i];
        if (a.degenerate || b.degenerate) continue;
        if (b.dk_hat > a.dk_hat + a.dk_band + b.dk_band) series.dk_nonincreasing = false;
        const double lo = std::min(a.var_per_n, b.var_per_n);
        const double hi = std::max(a.var_per_n, b.var_per_n);
        if (lo > 0.0 && hi / lo > 2.0) series.var_slope_stable = false;
    }
    return series;
}

} // namespace malign
