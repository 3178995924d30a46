// Acceptance gate: one test case per criterion, each printing a single
// PASS/FAIL line. Tolerances and seeds are pinned here and nowhere else.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "malign/blocks.hpp"
#include "malign/cli.hpp"
#include "malign/experiments.hpp"
#include "malign/mc_stats.hpp"
#include "malign/stein.hpp"

using namespace malign;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[criterion %02d] %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

const std::vector<int> kX{0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 2, 0};
const std::vector<int> kY{1, 0, 0, 2, 1, 2, 0, 1, 0, 0, 0, 0};

std::vector<int> rand_seq(int n, int k, Rng& rng) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
    return s;
}

// Random valid table: one entry per non-decreasing orbit representative with
// a value on the grid {0, 1/2, 1, 3/2}. Throws Trivial when all draws are 0.
ScoreModel rand_model(int k, int m, Rng& rng) {
    std::vector<ScoreEntry> entries;
    std::vector<int> t(static_cast<std::size_t>(m), 0);
    const auto bump = [&] {
        for (int j = m - 1; j >= 0; --j) {
            if (++t[static_cast<std::size_t>(j)] < k) {
                for (int l = j + 1; l < m; ++l)
                    t[static_cast<std::size_t>(l)] = t[static_cast<std::size_t>(j)];
                return true;
            }
        }
        return false;
    };
    do {
        entries.push_back({t, {static_cast<std::int64_t>(rng.next_below(4)), 2}});
    } while (bump());
    return build_score_model(Alphabet{k}, m, entries);
}

ScoreModel rand_model_nontrivial(int k, int m, Rng& rng) {
    for (;;) {
        try {
            return rand_model(k, m, rng);
        } catch (const Error&) {
        }
    }
}

} // namespace

TEST_CASE("criterion-01 golden example") {
    // Reference values for the 12-letter three-word instance: L = 8, four
    // cells at v = 3, and one cell with letters ((1,2,1); (3,1,2,1); (3,1,2,1))
    // (written here in 0-based symbols). Checked exactly, under one second.
    Timer timer;
    const ScoreModel model = lcs_indicator_model(3, 3);
    const Instance inst{{kX, kY, kY}};
    const AlignmentResult r = align_exact(inst, model, true);
    const bool score_ok = r.score == 8;

    const BlockDecomposition decomp = decompose_cells(*r.path, inst, model, 3);
    const bool d_ok = decomp.d == 4;

    const std::vector<std::vector<int>> want{{0, 1, 0}, {2, 0, 1, 0}, {2, 0, 1, 0}};
    bool cell_ok = false;
    for (const auto& cell : decomp.cells) {
        bool match = true;
        for (int j = 0; j < 3 && match; ++j) {
            const auto& range = cell[static_cast<std::size_t>(j)];
            std::vector<int> letters;
            for (int i = range.first; i <= range.last; ++i)
                letters.push_back(inst.sequences[static_cast<std::size_t>(j)][static_cast<std::size_t>(i - 1)]);
            match = letters == want[static_cast<std::size_t>(j)];
        }
        cell_ok = cell_ok || match;
    }
    const double secs = timer.seconds();
    const bool pass = score_ok && d_ok && cell_ok && secs < 1.0;
    report(1, pass,
           "L=" + std::to_string(r.score) + " (want 8), d=" + std::to_string(decomp.d) +
               " (want 4), reference cell " + (cell_ok ? "found" : "absent") + ", " +
               std::to_string(secs) + "s");
    CHECK(score_ok);
    CHECK(d_ok);
    CHECK(cell_ok);
    CHECK(secs < 1.0);
}

TEST_CASE("criterion-02 oracle equivalence") {
    Timer timer;
    Rng rng(0xACCE97);
    int matches = 0;
    const int total = 500;
    for (int trial = 0; trial < total; ++trial) {
        const int m = trial % 2 == 0 ? 2 : 3;
        const int k = 2 + static_cast<int>(rng.next_below(2));
        ScoreModel model{};
        try {
            model = rand_model(k, m, rng);
        } catch (const Error&) {
            ++matches; // trivial table drawn: nothing to compare, not a failure
            continue;
        }
        Instance inst;
        for (int j = 0; j < m; ++j)
            inst.sequences.push_back(rand_seq(2 + static_cast<int>(rng.next_below(6)), k, rng));
        if (align_exact(inst, model, false).score == brute_force_score(inst, model)) ++matches;
    }
    const double secs = timer.seconds();
    const bool pass = matches == total && secs < 60.0;
    report(2, pass,
           std::to_string(matches) + "/" + std::to_string(total) + " exact matches, " +
               std::to_string(secs) + "s (limit 60)");
    CHECK(matches == total);
    CHECK(secs < 60.0);
}

TEST_CASE("criterion-03 bounded differences") {
    Timer timer;
    Rng rng(0xD1FF2);
    const ScoreModel indicator = lcs_indicator_model(3, 2);
    const ScoreModel rational = rand_model_nontrivial(3, 2, rng);
    int violations = 0;
    const int total = 10000;
    for (int trial = 0; trial < total; ++trial) {
        const ScoreModel& model = trial % 2 == 0 ? indicator : rational;
        Instance inst{{rand_seq(30, 3, rng), rand_seq(30, 3, rng)}};
        const score_t base = align_exact(inst, model, false).score;
        auto& seq = inst.sequences[rng.next_below(2)];
        seq[rng.next_below(seq.size())] = static_cast<int>(rng.next_below(3));
        const score_t mutated = align_exact(inst, model, false).score;
        const score_t diff = mutated > base ? mutated - base : base - mutated;
        if (diff > model.d_max()) ++violations;
    }
    const bool pass = violations == 0;
    report(3, pass,
           std::to_string(violations) + " violations in " + std::to_string(total) +
               " single-letter mutations, " + std::to_string(timer.seconds()) + "s");
    CHECK(violations == 0);
}

TEST_CASE("criterion-04 concentration") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 20260824;
    cfg.replicates = 10000;
    const HoeffdingReport r =
        hoeffding_audit(model, SequenceDistribution::uniform(2, 2), 200, {5, 10, 20, 40}, cfg);
    const double secs = timer.seconds();
    const bool pass = r.violations == 0 && secs < 600.0;
    report(4, pass,
           std::to_string(r.violations) + " flagged violations at n=200 over 10^4 replicates, " +
               std::to_string(secs) + "s (limit 600)");
    CHECK(r.violations == 0);
    CHECK(secs < 600.0);
}

TEST_CASE("criterion-05 superadditivity") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 505;
    cfg.replicates = 2000;
    cfg.n_grid = {50, 100, 200, 400};
    const GammaCurveReport r =
        estimate_gamma_curve(model, SequenceDistribution::uniform(2, 2), cfg);
    bool pass = r.superadditivity.size() == 3;
    std::string detail;
    for (const auto& a : r.superadditivity) {
        pass = pass && a.ok;
        detail += "n=" + std::to_string(a.n) + (a.ok ? " ok " : " FAIL ");
    }
    report(5, pass, detail + std::to_string(timer.seconds()) + "s");
    CHECK(pass);
}

TEST_CASE("criterion-06 gamma-tilde surface") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 606;
    cfg.replicates = 2000;
    std::vector<std::vector<double>> grid;
    for (int i = -4; i <= 4; ++i) grid.push_back({1.0 + 0.1 * i, 1.0 - 0.1 * i});
    const SurfaceReport r =
        estimate_gamma_surface(model, SequenceDistribution::uniform(2, 2), 100, grid, cfg);
    const bool pass = r.max_at_center && r.concavity_ok && !r.concavity.empty();
    report(6, pass,
           std::string("max at center: ") + (r.max_at_center ? "yes" : "no") + ", " +
               std::to_string(r.concavity.size()) + " midpoint checks " +
               (r.concavity_ok ? "all ok" : "FAILED") + ", " + std::to_string(timer.seconds()) +
               "s");
    CHECK(r.max_at_center);
    CHECK(r.concavity_ok);
}

TEST_CASE("criterion-07 diagonal closeness") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    const int n = 1024, v = 64; // v | n, nearest divisor to n^alpha ~ 52.6
    const double alpha = 4.0 / 7.0;
    const double c1 = 0.75; // calibrated: see docs/calibration.md
    const double eps = epsilon_schedule(n, alpha, c1);
    int e_holds = 0, d_holds = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        Rng rng = Rng::stream(7777, static_cast<std::uint64_t>(s));
        const Instance inst = draw_instance(model, dist, {n, n}, rng);
        const AlignmentResult r = align_exact(inst, model, true);
        const BlockDecomposition decomp = decompose_cells(*r.path, inst, model, v);
        DiagonalConfig cfg;
        cfg.p_lo = {0.5};
        cfg.p_hi = {2.0};
        cfg.epsilon = eps;
        cfg.alpha = alpha;
        cfg.c1 = c1;
        if (check_E_event(decomp, cfg).holds) {
            ++e_holds;
            if (check_D_event(*r.path, n, cfg, v)) ++d_holds;
        }
    }
    const bool e_ok = e_holds >= static_cast<int>(0.95 * seeds);
    const bool incl_ok = d_holds == e_holds;
    const bool pass = e_ok && incl_ok;
    report(7, pass,
           "E holds " + std::to_string(e_holds) + "/" + std::to_string(seeds) +
               " (need >=190), D|E " + std::to_string(d_holds) + "/" + std::to_string(e_holds) +
               ", eps=" + std::to_string(eps) + ", " + std::to_string(timer.seconds()) + "s");
    CHECK(e_ok);
    CHECK(incl_ok);
}

TEST_CASE("criterion-08 central limit direction") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    McConfig cfg;
    cfg.seed = 20260824; // pinned; pilot values recorded in docs/calibration.md
    cfg.replicates = 10000;
    const CltSeries s =
        clt_report(model, SequenceDistribution::uniform(2, 2), {100, 1600}, cfg);
    const auto& lo = s.rows[0];
    const auto& hi = s.rows[1];
    const bool direction = hi.dk_hat < lo.dk_hat - (lo.dk_band + hi.dk_band);
    const bool threshold = hi.dk_hat < 0.08;
    const double secs = timer.seconds();
    const bool pass = direction && threshold && secs < 1800.0;
    report(8, pass,
           "dk(100)=" + std::to_string(lo.dk_hat) + ", dk(1600)=" + std::to_string(hi.dk_hat) +
               " (<0.08), bands " + std::to_string(lo.dk_band + hi.dk_band) + ", " +
               std::to_string(secs) + "s (limit 1800)");
    CHECK(direction);
    CHECK(threshold);
    CHECK(secs < 1800.0);
}

TEST_CASE("criterion-09 recombination machinery") {
    Timer timer;
    const ScoreModel model = lcs_indicator_model(2, 2);
    const SequenceDistribution dist = SequenceDistribution::uniform(2, 2);
    Rng rng = Rng::stream(31337, 1);
    const PairedSample p = PairedSample::draw(model, dist, 6, rng); // mn = 12
    const SteinEstimate exact = stein_exact(model, p);
    const SteinEstimate sampled = stein_sampled(model, p, 1000000, rng);
    const bool within_se = std::abs(sampled.T - exact.T) <= 3.0 * sampled.se_T;
    const bool rel_ok = std::abs(sampled.T - exact.T) <= 0.05 * std::abs(exact.T);
    bool kappa_ok = true;
    for (int N = 2; N <= 14; ++N)
        kappa_ok = kappa_ok && std::abs(kappa_normalization(N) - N) <= 1e-12 * N;
    const bool pass = within_se && rel_ok && kappa_ok;
    report(9, pass,
           "exact T=" + std::to_string(exact.T) + ", sampled=" + std::to_string(sampled.T) +
               " +- " + std::to_string(sampled.se_T) + ", kappa identity " +
               (kappa_ok ? "ok" : "FAIL") + ", " + std::to_string(timer.seconds()) + "s");
    CHECK(within_se);
    CHECK(rel_ok);
    CHECK(kappa_ok);
}

TEST_CASE("criterion-10 concluding experiments") {
    Timer timer;
    Rng rng(0xE8);
    const ScoreModel model = lcs_indicator_model(2, 2);
    // (a) field recursion vs aligner, exact, 100 instances
    int bm_matches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(14));
        const auto x = rand_seq(n, 2, rng), y = rand_seq(n, 2, rng);
        std::vector<std::vector<score_t>> field(static_cast<std::size_t>(n),
                                                std::vector<score_t>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                field[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    x[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)] ? 1 : 0;
        if (bm_recursion(field) == align_exact(Instance{{x, y}}, model, false).score) ++bm_matches;
    }
    // (b) window-zero scores equal the LIS oracle on every seeded draw
    PermConfig pc;
    pc.n = 1024;
    pc.c = 0.0;
    pc.replicates = 200;
    pc.seed = 1010;
    const PermReport pr = run_perm(pc);
    int lis_matches = 0;
    for (int i = 0; i < pc.replicates; ++i) {
        Rng stream = Rng::stream(pc.seed, static_cast<std::uint64_t>(i));
        const auto pi = random_permutation(pc.n, stream);
        const auto rho = random_permutation(pc.n, stream);
        if (pr.samples[static_cast<std::size_t>(i)] ==
            static_cast<score_t>(lis_oracle(compose_inverse(rho, pi))) * (pc.n - 1))
            ++lis_matches;
    }
    // (c) sqrt-n scaling window
    const bool scaling = pr.mean_over_sqrt_n >= 1.6 && pr.mean_over_sqrt_n <= 2.4;
    const bool pass = bm_matches == 100 && lis_matches == 200 && scaling;
    report(10, pass,
           "field recursion " + std::to_string(bm_matches) + "/100, LIS " +
               std::to_string(lis_matches) + "/200, mean/sqrt(n)=" +
               std::to_string(pr.mean_over_sqrt_n) + " in [1.6,2.4], " +
               std::to_string(timer.seconds()) + "s");
    CHECK(bm_matches == 100);
    CHECK(lis_matches == 200);
    CHECK(scaling);
}

TEST_CASE("criterion-11 reproducibility") {
    Timer timer;
    const ordered_json clt_cfg{{"model", "lcs-indicator:2:2"}, {"dist", "uniform"},
                               {"n_grid", {16, 32}},           {"reps", 200},
                               {"seed", 99},                   {"c_star", 0.01}};
    const ordered_json perm_cfg{
        {"n", 64}, {"c", 1.0}, {"reps", 50}, {"seed", 3}, {"literal", false}};

    bool pass = true;
    std::string detail;
    for (const auto& [command, cfg] : std::vector<std::pair<std::string, ordered_json>>{
             {"clt", clt_cfg}, {"perm", perm_cfg}}) {
        const RunManifest manifest = make_manifest(command, cfg);
        std::vector<std::string> outputs;
        for (int workers : {1, 3, 7}) {
            const ExecResult r = execute_command(command, cfg, workers);
            ordered_json full = r.report;
            full["config_digest"] = manifest.digest;
            outputs.push_back(full.dump(2));
        }
        // regeneration through the manifest round trip
        const RunManifest replayed = RunManifest::from_json(
            ordered_json::parse(manifest.to_json().dump()));
        const ExecResult again = execute_command(replayed.command, replayed.config, 2);
        ordered_json full = again.report;
        full["config_digest"] = replayed.digest;
        outputs.push_back(full.dump(2));
        bool same = true;
        for (const auto& o : outputs) same = same && o == outputs.front();
        pass = pass && same;
        detail += command + (same ? " stable " : " UNSTABLE ");
    }
    report(11, pass, detail + std::to_string(timer.seconds()) + "s");
    CHECK(pass);
}
