#include <doctest.h>

#include <cmath>
#include <vector>

#include "malign/blocks.hpp"
#include "malign/rng.hpp"

using namespace malign;

namespace {

std::vector<int> rand_seq(int n, int k, Rng& rng) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
    return s;
}

DiagonalConfig basic_cfg(int m) {
    DiagonalConfig cfg;
    cfg.p_lo.assign(static_cast<std::size_t>(m - 1), 0.5);
    cfg.p_hi.assign(static_cast<std::size_t>(m - 1), 2.0);
    cfg.epsilon = 0.25;
    return cfg;
}

// Test-only oracle: quantify the width condition over EVERY monotone
// breakpoint vector whose cells re-sum to L_n (m=2 only, tiny n).
bool exhaustive_E(const Instance& inst, const ScoreModel& model, int v,
                  const DiagonalConfig& cfg) {
    const int n = inst.lengths()[0];
    const int d = n / v;
    const score_t total = align_exact(inst, model, false).score;
    std::vector<int> r(static_cast<std::size_t>(d) + 1, 0);
    r[static_cast<std::size_t>(d)] = n;
    bool all_ok = true;
    auto widths_ok = [&] {
        int good = 0;
        for (int k = 1; k <= d; ++k) {
            const int w = r[static_cast<std::size_t>(k)] - r[static_cast<std::size_t>(k - 1)];
            if (w >= v * cfg.p_lo[0] && w <= v * cfg.p_hi[0]) ++good;
        }
        return static_cast<double>(good) / d >= 1.0 - cfg.epsilon;
    };
    auto rec = [&](auto&& self, int k) -> void {
        if (k == d) {
            score_t sum = 0;
            for (int kk = 1; kk <= d; ++kk) {
                Instance cell;
                cell.sequences.push_back(
                    {inst.sequences[0].begin() + v * (kk - 1), inst.sequences[0].begin() + v * kk});
                cell.sequences.push_back({inst.sequences[1].begin() + r[static_cast<std::size_t>(kk - 1)],
                                          inst.sequences[1].begin() + r[static_cast<std::size_t>(kk)]});
                sum += align_exact(cell, model, false).score;
            }
            if (sum == total && !widths_ok()) all_ok = false;
            return;
        }
        for (int next = r[static_cast<std::size_t>(k - 1)]; next <= n; ++next) {
            r[static_cast<std::size_t>(k)] = next;
            self(self, k + 1);
        }
    };
    rec(rec, 1);
    return all_ok;
}

} // namespace

TEST_CASE("identical sequences decompose on exact diagonal breakpoints") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const std::vector<int> s{0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 0};
    const Instance inst{{s, s}};
    const auto path = *align_exact(inst, model, true).path;
    for (int v : {3, 4, 6}) {
        const BlockDecomposition d = decompose_cells(path, inst, model, v);
        CHECK(d.d == 12 / v);
        for (int k = 0; k <= d.d; ++k)
            CHECK(d.breakpoints[0][static_cast<std::size_t>(k)] == v * k);
        const EEventResult e = check_E_event(d, basic_cfg(2));
        CHECK(e.holds);
        CHECK(e.good_fraction == 1.0);
    }
}

TEST_CASE("non-divisible block length rejected") {
    const ScoreModel model = lcs_indicator_model(2, 2);
    const std::vector<int> s{0, 1, 0, 1, 0, 1};
    const Instance inst{{s, s}};
    const auto path = *align_exact(inst, model, true).path;
    try {
        decompose_cells(path, inst, model, 4);
        FAIL("expected NotDivisible");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotDivisible);
    }
}

TEST_CASE("random decompositions: monotone breakpoints and cell additivity") {
    Rng rng(0xB10C);
    const ScoreModel model = lcs_indicator_model(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst{{rand_seq(24, 2, rng), rand_seq(24, 2, rng)}};
        const auto path = *align_exact(inst, model, true).path;
        for (int v : {3, 4}) {
            // decompose_cells re-solves every cell and throws NotOptimalPath if
            // the per-cell optima fail to sum to L_n, so success IS the check.
            const BlockDecomposition d = decompose_cells(path, inst, model, v);
            CHECK(d.d == 24 / v);
            const auto& r = d.breakpoints[0];
            CHECK(r.front() == 0);
            CHECK(r.back() == 24);
            for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k - 1] <= r[k]);
            // widths partition sequence 2
            int total_width = 0;
            for (int w : d.widths(2)) {
                CHECK(w >= 0);
                total_width += w;
            }
            CHECK(total_width == 24);
        }
    }
}

TEST_CASE("E event on a hand-built decomposition with widths 5,0,4,3") {
    BlockDecomposition d;
    d.v = 3;
    d.d = 4;
    d.breakpoints = {{0, 5, 5, 9, 12}};
    DiagonalConfig cfg = basic_cfg(2);
    const EEventResult e = check_E_event(d, cfg);
    // widths 5,0,4,3 against [1.5, 6]: only the empty cell violates
    CHECK(e.good_fraction == doctest::Approx(0.75));
    CHECK(e.holds);
    cfg.epsilon = 0.2;
    CHECK_FALSE(check_E_event(d, cfg).holds);
}

TEST_CASE("D event basics") {
    DiagonalConfig cfg = basic_cfg(2);
    cfg.epsilon = 0.01;
    // Diagonal path always inside.
    std::vector<PathTuple> diag;
    for (int i = 1; i <= 20; ++i) diag.push_back({i, i});
    CHECK(check_D_event(diag, 20, cfg, 2));
    // Aligning (1, n) with a small margin violates the upper envelope.
    std::vector<PathTuple> bad{{1, 100}};
    CHECK_FALSE(check_D_event(bad, 100, cfg, 2));
}

TEST_CASE("E implies D on random instances") {
    Rng rng(0xED0D);
    const ScoreModel model = lcs_indicator_model(2, 2);
    int e_holds = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst{{rand_seq(24, 2, rng), rand_seq(24, 2, rng)}};
        const auto path = *align_exact(inst, model, true).path;
        const int v = 4;
        const BlockDecomposition d = decompose_cells(path, inst, model, v);
        DiagonalConfig cfg = basic_cfg(2);
        cfg.epsilon = 0.3;
        if (check_E_event(d, cfg).holds) {
            ++e_holds;
            CHECK(check_D_event(path, 24, cfg, v));
        }
    }
    CHECK(e_holds > 0); // the implication must actually be exercised
}

TEST_CASE("canonical E is necessary for the all-breakpoints event") {
    Rng rng(0xEEEE);
    const ScoreModel model = lcs_indicator_model(2, 2);
    for (int trial = 0; trial < 12; ++trial) {
        const Instance inst{{rand_seq(8, 2, rng), rand_seq(8, 2, rng)}};
        const auto path = *align_exact(inst, model, true).path;
        const BlockDecomposition d = decompose_cells(path, inst, model, 4);
        DiagonalConfig cfg = basic_cfg(2);
        cfg.epsilon = 0.4;
        if (exhaustive_E(inst, model, 4, cfg)) CHECK(check_E_event(d, cfg).holds);
    }
}

TEST_CASE("epsilon schedule") {
    CHECK(epsilon_schedule(1, 0.5, 2.0) == doctest::Approx(2.0 * std::sqrt(1.0 + std::log(2.0))));
    double prev = epsilon_schedule(2, 0.3, 1.0);
    for (int n = 3; n < 60; ++n) {
        const double cur = epsilon_schedule(n, 0.3, 1.0);
        CHECK(cur < prev);
        prev = cur;
    }
    // High-precision spot value at n=1e4, alpha=4/7.
    const long double na = std::pow(10000.0L, 4.0L / 7.0L);
    const long double expect = std::sqrt((1.0L + std::log(na + 1.0L)) / na);
    CHECK(epsilon_schedule(1e4, 4.0 / 7.0, 1.0) ==
          doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));
    CHECK_THROWS_AS(epsilon_schedule(100, 1.5, 1.0), Error);
    CHECK_THROWS_AS(epsilon_schedule(100, 0.5, -1.0), Error);
}

TEST_CASE("diagonal config validation") {
    DiagonalConfig cfg = basic_cfg(3);
    CHECK_NOTHROW(cfg.validate(3));
    CHECK_THROWS_AS(cfg.validate(2), Error); // arity mismatch
    cfg.p_lo[0] = 1.5;
    CHECK_THROWS_AS(cfg.validate(3), Error);
}
