#include "malign/blocks.hpp"

#include <algorithm>
#include <cmath>

namespace malign {

std::vector<int> BlockDecomposition::widths(int j) const {
    const auto& r = breakpoints.at(static_cast<std::size_t>(j - 2));
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int kk = 1; kk <= d; ++kk)
        out.push_back(r[static_cast<std::size_t>(kk)] - r[static_cast<std::size_t>(kk - 1)]);
    return out;
}

void DiagonalConfig::validate(int m) const {
    if (static_cast<int>(p_lo.size()) != m - 1 || static_cast<int>(p_hi.size()) != m - 1)
        throw Error(Errc::BadConfig, "p_lo/p_hi must have one entry per sequence j=2..m");
    for (std::size_t i = 0; i < p_lo.size(); ++i)
        if (!(p_lo[i] > 0.0 && p_lo[i] < 1.0 && p_hi[i] > 1.0))
            throw Error(Errc::BadConfig, "need 0 < p_lo < 1 < p_hi componentwise");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::BadConfig, "epsilon must be in (0,1)");
    if (alpha != 0.0 && !(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::BadConfig, "alpha must be in (0,1)");
}

BlockDecomposition decompose_cells(const std::vector<PathTuple>& path, const Instance& instance,
                                   const ScoreModel& model, int v) {
    const int m = instance.arity();
    const auto lengths = instance.lengths();
    const int n = lengths[0];
    for (int len : lengths)
        if (len != n) throw Error(Errc::BadConfig, "cell decomposition needs equal lengths");
    if (v < 1 || n % v != 0) throw Error(Errc::NotDivisible, "block length v must divide n");

    BlockDecomposition decomp;
    decomp.v = v;
    decomp.d = n / v;

    decomp.breakpoints.assign(static_cast<std::size_t>(m - 1),
                              std::vector<int>(static_cast<std::size_t>(decomp.d) + 1, 0));
    for (int j = 2; j <= m; ++j) {
        auto& r = decomp.breakpoints[static_cast<std::size_t>(j - 2)];
        for (int kk = 1; kk <= decomp.d; ++kk) {
            int best = r[static_cast<std::size_t>(kk - 1)];
            for (const auto& tuple : path)
                if (tuple[0] <= v * kk)
                    best = std::max(best, tuple[static_cast<std::size_t>(j - 1)]);
            r[static_cast<std::size_t>(kk)] = best;
        }
        r[static_cast<std::size_t>(decomp.d)] = n;
    }

    decomp.cells.assign(static_cast<std::size_t>(decomp.d), {});
    for (int kk = 1; kk <= decomp.d; ++kk) {
        auto& cell = decomp.cells[static_cast<std::size_t>(kk - 1)];
        cell.resize(static_cast<std::size_t>(m));
        cell[0] = IndexRange{v * (kk - 1) + 1, v * kk};
        for (int j = 2; j <= m; ++j) {
            const auto& r = decomp.breakpoints[static_cast<std::size_t>(j - 2)];
            cell[static_cast<std::size_t>(j - 1)] =
                IndexRange{r[static_cast<std::size_t>(kk - 1)] + 1, r[static_cast<std::size_t>(kk)]};
        }
    }

    // Additivity: per-cell optima must sum back to L_n.
    score_t cell_sum = 0;
    for (const auto& cell : decomp.cells) {
        Instance sub;
        sub.sequences.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const auto& range = cell[static_cast<std::size_t>(j)];
            const auto& seq = instance.sequences[static_cast<std::size_t>(j)];
            for (int i = range.first; i <= range.last; ++i)
                sub.sequences[static_cast<std::size_t>(j)].push_back(seq[static_cast<std::size_t>(i - 1)]);
        }
        cell_sum += align_exact(sub, model, false).score;
    }
    const score_t total = align_exact(instance, model, false).score;
    if (cell_sum != total)
        throw Error(Errc::NotOptimalPath, "cell scores sum to " + std::to_string(cell_sum) +
                                              " but L_n is " + std::to_string(total));
    return decomp;
}

EEventResult check_E_event(const BlockDecomposition& decomp, const DiagonalConfig& cfg) {
    const int m = static_cast<int>(decomp.breakpoints.size()) + 1;
    cfg.validate(m);
    int good = 0;
    for (int kk = 1; kk <= decomp.d; ++kk) {
        bool ok = true;
        for (int j = 2; j <= m; ++j) {
            const auto& r = decomp.breakpoints[static_cast<std::size_t>(j - 2)];
            const double w = r[static_cast<std::size_t>(kk)] - r[static_cast<std::size_t>(kk - 1)];
            const double lo = decomp.v * cfg.p_lo[static_cast<std::size_t>(j - 2)];
            const double hi = decomp.v * cfg.p_hi[static_cast<std::size_t>(j - 2)];
            if (w < lo || w > hi) { ok = false; break; }
        }
        if (ok) ++good;
    }
    EEventResult res;
    res.good_fraction = static_cast<double>(good) / decomp.d;
    res.holds = res.good_fraction >= 1.0 - cfg.epsilon;
    return res;
}

bool check_D_event(const std::vector<PathTuple>& path, int n, const DiagonalConfig& cfg, int v) {
    const double margin = n * cfg.epsilon + v;
    for (const auto& tuple : path) {
        const double x1 = tuple[0];
        for (std::size_t j = 1; j < tuple.size(); ++j) {
            const double xj = tuple[j];
            const double p1 = cfg.p_lo[j - 1];
            const double p2 = cfg.p_hi[j - 1];
            if (xj < p1 * x1 - p1 * margin || xj > p2 * x1 + p2 * margin) return false;
        }
    }
    return true;
}

double epsilon_schedule(double n, double alpha, double c1) {
    if (n < 1.0) throw Error(Errc::BadConfig, "n must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::BadConfig, "alpha must be in (0,1)");
    if (!(c1 > 0.0)) throw Error(Errc::BadConfig, "c1 must be positive");
    const double na = std::pow(n, alpha);
    return c1 * std::sqrt((1.0 + std::log(na + 1.0)) / na);
}

} // namespace malign
