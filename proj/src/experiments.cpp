#include "malign/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "malign/mc_stats.hpp"

namespace malign {

score_t bm_recursion(const std::vector<std::vector<score_t>>& field) {
    const std::size_t n = field.size();
    for (const auto& row : field)
        if (row.size() != n) throw Error(Errc::NonSquare, "score field must be n x n");
    if (n == 0) return 0;
    std::vector<score_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = 0;
        for (std::size_t j = 1; j <= n; ++j)
            cur[j] = std::max({prev[j], cur[j - 1], prev[j - 1] + field[i - 1][j - 1]});
        std::swap(prev, cur);
    }
    return prev[n];
}

void BmConfig::validate() const {
    if (n < 1) throw Error(Errc::BadConfig, "n must be >= 1");
    if (replicates < 1) throw Error(Errc::BadConfig, "replicates must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::BadConfig, "p must be in [0,1]");
    if (alphabet < 1) throw Error(Errc::BadConfig, "alphabet must be >= 1");
}

namespace {

score_t bm_sample(const BmConfig& cfg, Rng& rng) {
    const std::size_t n = static_cast<std::size_t>(cfg.n);
    if (cfg.mode == BmMode::dependent) {
        std::vector<int> x(n), y(n);
        for (auto& v : x) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.alphabet)));
        for (auto& v : y) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.alphabet)));
        std::vector<score_t> prev(n + 1, 0), cur(n + 1, 0);
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 1; j <= n; ++j) {
                const score_t s = x[i - 1] == y[j - 1] ? 1 : 0;
                cur[j] = std::max({prev[j], cur[j - 1], prev[j - 1] + s});
            }
            std::swap(prev, cur);
        }
        return prev[n];
    }
    // Independent mode: i.i.d. indicator field, streamed row by row.
    std::vector<score_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const score_t s = rng.next_double() < cfg.p ? 1 : 0;
            cur[j] = std::max({prev[j], cur[j - 1], prev[j - 1] + s});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

template <typename Draw>
std::vector<score_t> run_replicated(int replicates, int workers, std::uint64_t seed, Draw draw) {
    std::vector<score_t> out(static_cast<std::size_t>(replicates), 0);
    const int nw = std::min(resolve_workers(workers), replicates);
    auto work = [&](int w) {
        for (int r = w; r < replicates; r += nw) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
            out[static_cast<std::size_t>(r)] = draw(rng);
        }
    };
    if (nw == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < nw; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    return out;
}

double skewness_of(const std::vector<double>& xs) {
    const double mu = sample_mean(xs);
    double m2 = 0, m3 = 0;
    for (double x : xs) {
        const double d = x - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(xs.size());
    m3 /= static_cast<double>(xs.size());
    return m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

} // namespace

BmReport run_bm(const BmConfig& cfg) {
    cfg.validate();
    BmReport report;
    report.cfg = cfg;
    report.samples =
        run_replicated(cfg.replicates, cfg.workers, cfg.seed, [&](Rng& rng) { return bm_sample(cfg, rng); });
    std::vector<double> xs(report.samples.begin(), report.samples.end());
    report.mean_L = sample_mean(xs);
    report.se = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
    report.skewness = skewness_of(xs);
    return report;
}

void PermConfig::validate() const {
    if (n < 2) throw Error(Errc::BadConfig, "n must be >= 2");
    if (c < 0.0) throw Error(Errc::BadConfig, "c must be >= 0");
    if (replicates < 1) throw Error(Errc::BadConfig, "replicates must be >= 1");
}

std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const int k = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(k)]);
    }
    return p;
}

score_t perm_L_given(const std::vector<int>& pi, const std::vector<int>& rho, double c,
                     bool literal_formula) {
    const int n = static_cast<int>(pi.size());
    if (static_cast<int>(rho.size()) != n || n < 2)
        throw Error(Errc::NotPermutation, "need two permutations of the same n >= 2");

    // Scores live on the exact integer grid with denominator n-1.
    const score_t den = n - 1;
    auto score = [&](int a, int b) -> score_t {
        const int d = std::abs(a - b);
        if (literal_formula) return d <= c ? den - d : den;
        return d <= c ? den - d : 0;
    };

    std::vector<score_t> prev(static_cast<std::size_t>(n) + 1, 0),
        cur(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j)
            cur[static_cast<std::size_t>(j)] = std::max(
                {prev[static_cast<std::size_t>(j)], cur[static_cast<std::size_t>(j - 1)],
                 prev[static_cast<std::size_t>(j - 1)] +
                     score(pi[static_cast<std::size_t>(i - 1)], rho[static_cast<std::size_t>(j - 1)])});
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(n)];
}

score_t perm_score_L(const PermConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::vector<int> pi = random_permutation(cfg.n, rng);
    const std::vector<int> rho = random_permutation(cfg.n, rng);
    return perm_L_given(pi, rho, cfg.c, cfg.literal_formula);
}

PermReport run_perm(const PermConfig& cfg) {
    cfg.validate();
    PermReport report;
    report.cfg = cfg;
    report.samples = run_replicated(cfg.replicates, cfg.workers, cfg.seed,
                                    [&](Rng& rng) { return perm_score_L(cfg, rng); });
    std::vector<double> xs;
    xs.reserve(report.samples.size());
    for (score_t v : report.samples)
        xs.push_back(static_cast<double>(v) / static_cast<double>(cfg.n - 1));
    report.mean_L = sample_mean(xs);
    report.se = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
    report.mean_over_sqrt_n = report.mean_L / std::sqrt(static_cast<double>(cfg.n));
    return report;
}

int lis_oracle(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : perm) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
            throw Error(Errc::NotPermutation, "input is not a permutation of 0..n-1");
        seen[static_cast<std::size_t>(v)] = true;
    }
    std::vector<int> piles;
    for (int v : perm) {
        const auto it = std::lower_bound(piles.begin(), piles.end(), v);
        if (it == piles.end())
            piles.push_back(v);
        else
            *it = v;
    }
    return static_cast<int>(piles.size());
}

std::vector<int> compose_inverse(const std::vector<int>& rho, const std::vector<int>& pi) {
    const std::size_t n = pi.size();
    if (rho.size() != n) throw Error(Errc::NotPermutation, "permutation sizes differ");
    std::vector<int> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[static_cast<std::size_t>(rho[i])] = static_cast<int>(i);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = inv[static_cast<std::size_t>(pi[i])];
    return out;
}

} // namespace malign
