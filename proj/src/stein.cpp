#include "malign/stein.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "malign/mc_stats.hpp"

namespace malign {

void PairedSample::validate(const Alphabet& alphabet) const {
    if (m < 1 || n < 1) throw Error(Errc::BadConfig, "paired sample needs m, n >= 1");
    const std::size_t N = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
    if (w.size() != N || w_prime.size() != N)
        throw Error(Errc::BadConfig, "paired sample coordinate vectors must have length m*n");
    for (int x : w)
        if (x < 0 || x >= alphabet.size) throw Error(Errc::OutOfAlphabet, "symbol out of range");
    for (int x : w_prime)
        if (x < 0 || x >= alphabet.size) throw Error(Errc::OutOfAlphabet, "symbol out of range");
}

PairedSample PairedSample::draw(const ScoreModel& model, const SequenceDistribution& dist, int n,
                                Rng& rng) {
    dist.validate(model.alphabet());
    PairedSample p;
    p.m = model.arity();
    p.n = n;
    p.w.reserve(static_cast<std::size_t>(p.m) * n);
    p.w_prime.reserve(static_cast<std::size_t>(p.m) * n);
    for (int j = 0; j < p.m; ++j)
        for (int i = 0; i < n; ++i) p.w.push_back(rng.next_category(dist.probs[static_cast<std::size_t>(j)]));
    for (int j = 0; j < p.m; ++j)
        for (int i = 0; i < n; ++i)
            p.w_prime.push_back(rng.next_category(dist.probs[static_cast<std::size_t>(j)]));
    return p;
}

Instance PairedSample::assemble(std::uint32_t mask) const {
    Instance inst;
    inst.sequences.assign(static_cast<std::size_t>(m), {});
    for (int j = 0; j < m; ++j) {
        auto& seq = inst.sequences[static_cast<std::size_t>(j)];
        seq.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int coord = j * n + i;
            seq.push_back((mask >> coord) & 1u ? w_prime[static_cast<std::size_t>(coord)]
                                               : w[static_cast<std::size_t>(coord)]);
        }
    }
    return inst;
}

namespace {

score_t f_raw(const ScoreModel& model, const PairedSample& p, std::uint32_t mask) {
    return align_exact(p.assemble(mask), model, false).score;
}

/// Uniform subset of the given size plus a uniform coordinate outside it.
struct MaskDraw {
    std::uint32_t mask = 0;
    int j = 0;
};

MaskDraw draw_mask(int N, Rng& rng, std::vector<int>& scratch) {
    scratch.resize(static_cast<std::size_t>(N));
    std::iota(scratch.begin(), scratch.end(), 0);
    const int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
    for (int i = 0; i < a; ++i) {
        const int k = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N - i)));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(k)]);
    }
    MaskDraw d;
    for (int i = 0; i < a; ++i) d.mask |= 1u << scratch[static_cast<std::size_t>(i)];
    d.j = scratch[static_cast<std::size_t>(a + static_cast<int>(rng.next_below(
                      static_cast<std::uint64_t>(N - a))))];
    return d;
}

std::vector<double> log_binomials(int N) {
    std::vector<double> lc(static_cast<std::size_t>(N) + 1);
    for (int a = 0; a <= N; ++a)
        lc[static_cast<std::size_t>(a)] =
            std::lgamma(N + 1.0) - std::lgamma(a + 1.0) - std::lgamma(N - a + 1.0);
    return lc;
}

} // namespace

double delta_j(const ScoreModel& model, const PairedSample& paired, int j) {
    const int N = paired.size();
    if (j < 0 || j >= N) throw Error(Errc::IndexOutOfRange, "coordinate out of [0, mn)");
    const score_t d = f_raw(model, paired, 0) - f_raw(model, paired, 1u << j);
    return static_cast<double>(d) / static_cast<double>(model.scale());
}

SteinEstimate stein_exact(const ScoreModel& model, const PairedSample& paired) {
    const int N = paired.size();
    if (N > 14) throw Error(Errc::TooLarge, "exact mode enumerates 2^mn subsets; need mn <= 14");

    const std::uint32_t full = (1u << N) - 1u;
    std::vector<score_t> f(static_cast<std::size_t>(full) + 1);
    for (std::uint32_t mask = 0; mask <= full; ++mask) f[mask] = f_raw(model, paired, mask);

    std::vector<score_t> dw(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) dw[static_cast<std::size_t>(j)] = f[0] - f[1u << j];

    // Exact integer accumulation grouped by |A|; one division per size.
    std::vector<__int128> acc(static_cast<std::size_t>(N), 0), acc_abs(static_cast<std::size_t>(N), 0);
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        const int a = std::popcount(mask);
        for (int j = 0; j < N; ++j) {
            if ((mask >> j) & 1u) continue;
            const score_t da = f[mask] - f[mask | (1u << j)];
            acc[static_cast<std::size_t>(a)] +=
                static_cast<__int128>(dw[static_cast<std::size_t>(j)]) * da;
            acc_abs[static_cast<std::size_t>(a)] +=
                static_cast<__int128>(dw[static_cast<std::size_t>(j)]) * (da < 0 ? -da : da);
        }
    }

    std::vector<std::uint64_t> binom(static_cast<std::size_t>(N) + 1, 1);
    for (int a = 1; a <= N; ++a)
        binom[static_cast<std::size_t>(a)] =
            binom[static_cast<std::size_t>(a - 1)] * static_cast<std::uint64_t>(N - a + 1) /
            static_cast<std::uint64_t>(a);

    long double t = 0, tp = 0;
    for (int a = 0; a < N; ++a) {
        const long double denom = static_cast<long double>(binom[static_cast<std::size_t>(a)]) *
                                  static_cast<long double>(N - a);
        t += static_cast<long double>(acc[static_cast<std::size_t>(a)]) / denom;
        tp += static_cast<long double>(acc_abs[static_cast<std::size_t>(a)]) / denom;
    }
    const long double s2 = static_cast<long double>(model.scale()) * model.scale();
    SteinEstimate est;
    est.T = static_cast<double>(t / (2.0L * s2));
    est.T_prime = static_cast<double>(tp / (2.0L * s2));
    est.mode = SteinMode::exact;
    est.samples_used = static_cast<std::uint64_t>(full) * static_cast<std::uint64_t>(N);
    return est;
}

SteinEstimate stein_sampled(const ScoreModel& model, const PairedSample& paired,
                            std::uint64_t samples, Rng& rng) {
    if (samples < 1) throw Error(Errc::BadConfig, "samples must be >= 1");
    const int N = paired.size();
    const double scale = static_cast<double>(model.scale());

    std::unordered_map<std::uint32_t, score_t> memo;
    const bool use_memo = N <= 22;
    auto f = [&](std::uint32_t mask) -> score_t {
        if (!use_memo) return f_raw(model, paired, mask);
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        const score_t v = f_raw(model, paired, mask);
        memo.emplace(mask, v);
        return v;
    };

    std::vector<double> dw(static_cast<std::size_t>(N));
    const score_t f0 = f(0);
    for (int j = 0; j < N; ++j)
        dw[static_cast<std::size_t>(j)] = static_cast<double>(f0 - f(1u << j)) / scale;

    double sum = 0, sumsq = 0, sum_abs = 0, sumsq_abs = 0;
    std::vector<int> scratch;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const MaskDraw d = draw_mask(N, rng, scratch);
        const double da = static_cast<double>(f(d.mask) - f(d.mask | (1u << d.j))) / scale;
        const double x = dw[static_cast<std::size_t>(d.j)] * da;
        const double xa = dw[static_cast<std::size_t>(d.j)] * std::abs(da);
        sum += x;
        sumsq += x * x;
        sum_abs += xa;
        sumsq_abs += xa * xa;
    }
    const double k = static_cast<double>(samples);
    const double half_n = N / 2.0;
    SteinEstimate est;
    est.mode = SteinMode::sampled;
    est.samples_used = samples;
    est.T = half_n * (sum / k);
    est.T_prime = half_n * (sum_abs / k);
    if (samples > 1) {
        const double v = std::max(0.0, (sumsq - sum * sum / k) / (k - 1.0));
        const double va = std::max(0.0, (sumsq_abs - sum_abs * sum_abs / k) / (k - 1.0));
        est.se_T = half_n * std::sqrt(v / k);
        est.se_T_prime = half_n * std::sqrt(va / k);
    }
    return est;
}

double kappa_normalization(int N) {
    if (N < 1 || N > 24) throw Error(Errc::TooLarge, "mask enumeration supports 1 <= N <= 24");
    const auto lc = log_binomials(N);
    const std::uint32_t full = (1u << N) - 1u;
    double sum = 0.0;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        const int a = std::popcount(mask);
        sum += static_cast<double>(N - a) /
               (std::exp(lc[static_cast<std::size_t>(a)]) * static_cast<double>(N - a));
    }
    return sum;
}

void BoundConfig::validate() const {
    if (n < 1) throw Error(Errc::BadConfig, "n must be >= 1");
    if (outer_reps < 30) throw Error(Errc::BadConfig, "need at least 30 outer replicates");
    if (inner_samples < 1) throw Error(Errc::BadConfig, "inner_samples must be >= 1");
    if (sigma_reps < 2) throw Error(Errc::BadConfig, "sigma_reps must be >= 2");
}

namespace {

/// sqrt(max(var, 0)) / denom with a delta-method standard error from the
/// chi-square-style variance of a variance estimate.
BoundTerm sqrt_var_term(double var, int reps, double denom) {
    BoundTerm t;
    const double v = std::max(0.0, var);
    t.value = std::sqrt(v) / denom;
    if (v > 0.0 && reps > 1) {
        const double se_var = v * std::sqrt(2.0 / (reps - 1));
        t.se = se_var / (2.0 * std::sqrt(v) * denom);
    }
    return t;
}

} // namespace

BoundReport bound_report(const ScoreModel& model, const SequenceDistribution& dist,
                         const BoundConfig& cfg) {
    cfg.validate();
    const int m = model.arity();
    const int N = m * cfg.n;
    const double scale = static_cast<double>(model.scale());

    // sigma^2 from its own replicate set.
    {
        const std::vector<int> lengths(static_cast<std::size_t>(m), cfg.n);
        const auto raw = replicate_L(model, dist, lengths, cfg.seed ^ 0xA5A5A5A5A5A5A5A5ull,
                                     cfg.sigma_reps, cfg.workers);
        double acc = 0;
        std::vector<double> xs;
        xs.reserve(raw.size());
        for (score_t v : raw) xs.push_back(static_cast<double>(v) / scale);
        acc = sample_variance(xs);
        if (acc <= 0.0)
            throw Error(Errc::DegenerateVariance, "replicate-set variance of L is zero");
        BoundReport report;
        report.sigma2 = acc;

        const int R = cfg.outer_reps;
        std::vector<double> t_mean(static_cast<std::size_t>(R)), tp_mean(static_cast<std::size_t>(R));
        // |Delta_j|^3 and |Delta_j|^6 samples, coordinate-major.
        std::vector<double> m3(static_cast<std::size_t>(N) * R), m6(static_cast<std::size_t>(N) * R);

        auto run_outer = [&](int r) {
            Rng rng = Rng::stream(cfg.seed, 0x0C0DE000ull + static_cast<std::uint64_t>(r));
            PairedSample p = PairedSample::draw(model, dist, cfg.n, rng);
            const score_t f0 = f_raw(model, p, 0);

            for (int j = 0; j < N; ++j) {
                const double d = static_cast<double>(f0 - f_raw(model, p, 1u << j)) / scale;
                const double a3 = std::abs(d) * d * d;
                m3[static_cast<std::size_t>(j) * R + r] = a3;
                m6[static_cast<std::size_t>(j) * R + r] = a3 * a3;
            }

            double sum = 0, sum_abs = 0;
            std::vector<int> scratch;
            for (int s = 0; s < cfg.inner_samples; ++s) {
                // Fresh W' per inner sample.
                for (int j = 0; j < m; ++j)
                    for (int i = 0; i < cfg.n; ++i)
                        p.w_prime[static_cast<std::size_t>(j) * cfg.n + i] =
                            rng.next_category(dist.probs[static_cast<std::size_t>(j)]);
                const MaskDraw d = draw_mask(N, rng, scratch);
                const double dw =
                    static_cast<double>(f0 - f_raw(model, p, 1u << d.j)) / scale;
                const double da =
                    static_cast<double>(f_raw(model, p, d.mask) -
                                        f_raw(model, p, d.mask | (1u << d.j))) /
                    scale;
                sum += dw * da;
                sum_abs += dw * std::abs(da);
            }
            t_mean[static_cast<std::size_t>(r)] = (N / 2.0) * sum / cfg.inner_samples;
            tp_mean[static_cast<std::size_t>(r)] = (N / 2.0) * sum_abs / cfg.inner_samples;
        };

        const int nw = std::min(resolve_workers(cfg.workers), R);
        if (nw == 1) {
            for (int r = 0; r < R; ++r) run_outer(r);
        } else {
            std::vector<std::thread> threads;
            for (int w = 0; w < nw; ++w)
                threads.emplace_back([&, w] {
                    for (int r = w; r < R; r += nw) run_outer(r);
                });
            for (auto& t : threads) t.join();
        }

        report.term_varT = sqrt_var_term(sample_variance(t_mean), R, report.sigma2);
        report.term_varTprime = sqrt_var_term(sample_variance(tp_mean), R, report.sigma2);

        const double sigma3 = std::pow(report.sigma2, 1.5);
        double sixth = 0, sixth_se2 = 0, third = 0, third_se2 = 0;
        for (int j = 0; j < N; ++j) {
            const std::vector<double> xs3(m3.begin() + static_cast<std::ptrdiff_t>(j) * R,
                                          m3.begin() + static_cast<std::ptrdiff_t>(j + 1) * R);
            const std::vector<double> xs6(m6.begin() + static_cast<std::ptrdiff_t>(j) * R,
                                          m6.begin() + static_cast<std::ptrdiff_t>(j + 1) * R);
            const double mu3 = sample_mean(xs3), mu6 = sample_mean(xs6);
            sixth += std::sqrt(std::max(0.0, mu6)) / (4.0 * sigma3);
            third += std::sqrt(2.0 * 3.14159265358979323846) / 16.0 *
                     std::sqrt(std::max(0.0, mu3)) / sigma3;
            const double se3 = std::sqrt(sample_variance(xs3) / R);
            const double se6 = std::sqrt(sample_variance(xs6) / R);
            if (mu6 > 0.0) {
                const double s = se6 / (2.0 * std::sqrt(mu6) * 4.0 * sigma3);
                sixth_se2 += s * s;
            }
            if (mu3 > 0.0) {
                const double s = std::sqrt(2.0 * 3.14159265358979323846) / 16.0 * se3 /
                                 (2.0 * std::sqrt(mu3) * sigma3);
                third_se2 += s * s;
            }
        }
        report.term_sixth = BoundTerm{sixth, std::sqrt(sixth_se2)};
        report.term_third = BoundTerm{third, std::sqrt(third_se2)};
        report.total = report.term_varT.value + report.term_varTprime.value +
                       report.term_sixth.value + report.term_third.value;
        return report;
    }
}

} // namespace malign
