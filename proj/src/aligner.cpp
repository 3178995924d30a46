#include "malign/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace malign {

std::vector<int> Instance::lengths() const {
    std::vector<int> out;
    out.reserve(sequences.size());
    for (const auto& s : sequences) out.push_back(static_cast<int>(s.size()));
    return out;
}

void Instance::validate(const Alphabet& alphabet) const {
    for (const auto& seq : sequences)
        for (int s : seq)
            if (s < 0 || s >= alphabet.size)
                throw Error(Errc::OutOfAlphabet, "instance symbol out of alphabet range");
}

namespace {

constexpr unsigned kMoveDiag = 15;

/// Packed 4-bit move codes, one per lattice cell.
class NibbleTable {
public:
    explicit NibbleTable(std::uint64_t cells) : data_((cells + 1) / 2, 0) {}
    unsigned get(std::uint64_t i) const {
        return (data_[i >> 1] >> ((i & 1) * 4)) & 0xF;
    }
    void set(std::uint64_t i, unsigned v) {
        auto& b = data_[i >> 1];
        const unsigned shift = (i & 1) * 4;
        b = static_cast<std::uint8_t>((b & ~(0xF << shift)) | (v << shift));
    }

private:
    std::vector<std::uint8_t> data_;
};

std::uint64_t cell_count(const std::vector<int>& lengths) {
    std::uint64_t cells = 1;
    for (int n : lengths) {
        const auto dim = static_cast<std::uint64_t>(n) + 1;
        if (cells > std::numeric_limits<std::uint64_t>::max() / dim)
            throw Error(Errc::BudgetExceeded, "DP lattice size overflows");
        cells *= dim;
    }
    return cells;
}

/// Score-only LCS-style kernel for two sequences; the Monte Carlo hot path.
score_t align2_score(const std::vector<int>& a, const std::vector<int>& b, const ScoreModel& model,
                     SolverStats& stats) {
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
    const int k = model.alphabet_size();
    const score_t* table = model.table().data();
    std::vector<score_t> row(static_cast<std::size_t>(nb) + 1, 0);
    for (int i = 1; i <= na; ++i) {
        const score_t* srow = table + static_cast<std::size_t>(a[i - 1]) * k;
        score_t diag = row[0];
        for (int j = 1; j <= nb; ++j) {
            const score_t up = row[j];
            score_t best = diag + srow[b[j - 1]];
            if (up > best) best = up;
            if (row[j - 1] > best) best = row[j - 1];
            row[j] = best;
            diag = up;
        }
    }
    stats.cells_visited += static_cast<std::uint64_t>(na) * nb;
    stats.peak_memory_cells = std::max<std::uint64_t>(stats.peak_memory_cells, nb + 1);
    return row[nb];
}

struct BandBounds {
    // Inclusive per-row bounds for dims 1..m-1, or empty when unbanded.
    bool active = false;
    const Band* band = nullptr;
    std::vector<int> lengths;

    // Unclamped envelope values.
    double lo_raw(int j, int i0) const {
        return band->lo_slope[static_cast<std::size_t>(j - 1)] * i0 -
               band->lo_offset[static_cast<std::size_t>(j - 1)];
    }
    double hi_raw(int j, int i0) const {
        return band->hi_slope[static_cast<std::size_t>(j - 1)] * i0 +
               band->hi_offset[static_cast<std::size_t>(j - 1)];
    }
    int lo(int j, int i0) const {
        const double v = lo_raw(j, i0);
        if (v <= 0.0) return 0;
        return static_cast<int>(std::ceil(v - 1e-9));
    }
    int hi(int j, int i0) const {
        const int n = lengths[static_cast<std::size_t>(j)];
        const double v = hi_raw(j, i0);
        if (v >= static_cast<double>(n)) return n;
        return static_cast<int>(std::floor(v + 1e-9));
    }
    bool inside(int i0, const std::vector<int>& idx) const {
        if (!active) return true;
        for (int j = 1; j < static_cast<int>(lengths.size()); ++j)
            if (idx[static_cast<std::size_t>(j)] < lo(j, i0) ||
                idx[static_cast<std::size_t>(j)] > hi(j, i0))
                return false;
        return true;
    }
};

struct DpOutcome {
    score_t score = 0;
    SolverStats stats;
    std::vector<PathTuple> path;      // filled when moves were recorded
    bool touched_boundary = false;    // any backtracked cell adjacent to out-of-band
    bool have_path = false;
};

/// General m-dimensional recursion, rolling two slabs along sequence 1.
/// Records canonical move codes when `record_moves` is set.
DpOutcome align_general(const Instance& instance, const ScoreModel& model, bool record_moves,
                        const BandBounds& bounds, const AlignBudget& budget) {
    const int m = instance.arity();
    const auto lengths = instance.lengths();
    const std::uint64_t cells = cell_count(lengths);
    const std::uint64_t cap = record_moves ? budget.with_path_cells : budget.score_only_cells;
    if (cells > cap)
        throw Error(Errc::BudgetExceeded, "DP cell count " + std::to_string(cells) +
                                              " exceeds budget " + std::to_string(cap));

    const int n0 = lengths[0];
    std::uint64_t slab = 1;
    for (int j = 1; j < m; ++j) slab *= static_cast<std::uint64_t>(lengths[static_cast<std::size_t>(j)]) + 1;

    // Strides within a slab for dims 1..m-1 (dim m-1 fastest).
    std::vector<std::uint64_t> stride(static_cast<std::size_t>(m), 0);
    {
        std::uint64_t s = 1;
        for (int j = m - 1; j >= 1; --j) {
            stride[static_cast<std::size_t>(j)] = s;
            s *= static_cast<std::uint64_t>(lengths[static_cast<std::size_t>(j)]) + 1;
        }
    }
    std::uint64_t diag_stride = 0;
    for (int j = 1; j < m; ++j) diag_stride += stride[static_cast<std::size_t>(j)];

    std::vector<score_t> prev(slab, 0), cur(slab, 0);
    NibbleTable moves(record_moves ? cells : 1);

    DpOutcome out;
    out.stats.peak_memory_cells = 2 * slab;

    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    const int k = model.alphabet_size();

    for (int i0 = 1; i0 <= n0; ++i0) {
        std::fill(cur.begin(), cur.end(), 0);
        idx[0] = i0;
        tuple[0] = instance.sequences[0][static_cast<std::size_t>(i0 - 1)];
        // Odometer over (i_1, ..., i_{m-1}).
        std::fill(idx.begin() + 1, idx.end(), 0);
        for (std::uint64_t pos = 0; pos < slab; ++pos) {
            bool interior = true;
            for (int j = 1; j < m; ++j) interior = interior && idx[static_cast<std::size_t>(j)] > 0;
            if (interior && bounds.inside(i0, idx)) {
                ++out.stats.cells_visited;
                std::size_t sidx = static_cast<std::size_t>(tuple[0]);
                for (int j = 1; j < m; ++j) {
                    tuple[static_cast<std::size_t>(j)] =
                        instance.sequences[static_cast<std::size_t>(j)]
                                          [static_cast<std::size_t>(idx[static_cast<std::size_t>(j)] - 1)];
                    sidx = sidx * static_cast<std::size_t>(k) +
                           static_cast<std::size_t>(tuple[static_cast<std::size_t>(j)]);
                }
                const score_t s = model.lookup_flat(sidx);
                const score_t diag = prev[pos - diag_stride] + s;
                score_t best = prev[pos]; // skip sequence 1
                for (int j = 1; j < m; ++j)
                    best = std::max(best, cur[pos - stride[static_cast<std::size_t>(j)]]);
                best = std::max(best, diag);
                cur[pos] = best;
                if (record_moves) {
                    unsigned mv;
                    if (s > 0 && diag == best) {
                        mv = kMoveDiag;
                    } else if (prev[pos] == best) {
                        mv = 1;
                    } else {
                        mv = 0;
                        for (int j = 1; j < m; ++j)
                            if (cur[pos - stride[static_cast<std::size_t>(j)]] == best) {
                                mv = static_cast<unsigned>(j) + 1;
                                break;
                            }
                    }
                    moves.set(static_cast<std::uint64_t>(i0) * slab + pos, mv);
                }
            }
            // advance odometer
            for (int j = m - 1; j >= 1; --j) {
                if (++idx[static_cast<std::size_t>(j)] <= lengths[static_cast<std::size_t>(j)]) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        std::swap(prev, cur);
    }
    out.score = prev[slab - 1];

    if (record_moves) {
        out.have_path = true;
        std::vector<int> c = lengths;
        auto is_boundary = [&](const std::vector<int>& cell) {
            if (!bounds.active) return false;
            for (int j = 1; j < m; ++j) {
                const int lo = bounds.lo(j, cell[0]);
                const int hi = bounds.hi(j, cell[0]);
                const int v = cell[static_cast<std::size_t>(j)];
                // A band edge is only a boundary when it cuts into the lattice.
                if (v == lo && bounds.lo_raw(j, cell[0]) > 0.0) return true;
                if (v == hi && bounds.hi_raw(j, cell[0]) <
                                   static_cast<double>(lengths[static_cast<std::size_t>(j)]))
                    return true;
            }
            // Row neighbors along sequence 1 can also fall out of band.
            for (int d : {-1, 1}) {
                const int r = cell[0] + d;
                if (r < 0 || r > n0) continue;
                for (int j = 1; j < m; ++j) {
                    const int v = cell[static_cast<std::size_t>(j)];
                    if (v < bounds.lo(j, r) || v > bounds.hi(j, r)) return true;
                }
            }
            return false;
        };
        while (std::all_of(c.begin(), c.end(), [](int v) { return v > 0; })) {
            if (bounds.active && !bounds.inside(c[0], c)) {
                out.touched_boundary = true;
                break;
            }
            if (is_boundary(c)) out.touched_boundary = true;
            std::uint64_t pos = 0;
            for (int j = 1; j < m; ++j)
                pos += static_cast<std::uint64_t>(c[static_cast<std::size_t>(j)]) *
                       stride[static_cast<std::size_t>(j)];
            const unsigned mv = moves.get(static_cast<std::uint64_t>(c[0]) * slab + pos);
            if (mv == kMoveDiag) {
                out.path.push_back(c);
                for (int& v : c) --v;
            } else if (mv >= 1 && mv <= static_cast<unsigned>(m)) {
                --c[static_cast<std::size_t>(mv - 1)];
            } else {
                break; // value 0 from here on
            }
        }
        std::reverse(out.path.begin(), out.path.end());
    }
    return out;
}

} // namespace

AlignmentResult align_exact(const Instance& instance, const ScoreModel& model, bool want_path,
                            const AlignBudget& budget) {
    const int m = instance.arity();
    if (m != model.arity())
        throw Error(Errc::ArityMismatch, "instance arity does not match score model");
    instance.validate(model.alphabet());
    for (const auto& seq : instance.sequences)
        if (seq.empty()) {
            AlignmentResult r;
            if (want_path) r.path.emplace();
            return r;
        }

    AlignmentResult result;
    if (!want_path && m == 2) {
        const std::uint64_t cells = cell_count(instance.lengths());
        if (cells > budget.score_only_cells)
            throw Error(Errc::BudgetExceeded, "DP cell count exceeds budget");
        result.score = align2_score(instance.sequences[0], instance.sequences[1], model,
                                    result.stats);
        return result;
    }
    BandBounds none;
    DpOutcome out = align_general(instance, model, want_path, none, budget);
    result.score = out.score;
    result.stats = out.stats;
    if (want_path) result.path = std::move(out.path);
    return result;
}

score_t brute_force_score(const Instance& instance, const ScoreModel& model) {
    const int m = instance.arity();
    if (m != model.arity())
        throw Error(Errc::ArityMismatch, "instance arity does not match score model");
    if (m > 3) throw Error(Errc::TooLarge, "brute force limited to m <= 3");
    for (const auto& seq : instance.sequences)
        if (seq.size() > 8) throw Error(Errc::TooLarge, "brute force limited to n_j <= 8");
    instance.validate(model.alphabet());

    const auto lengths = instance.lengths();
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);

    // Enumerate all alignments as chains of strictly increasing index tuples.
    auto rec = [&](auto&& self, const std::vector<int>& start) -> score_t {
        score_t best = 0;
        std::vector<int> pick(static_cast<std::size_t>(m));
        std::vector<int> next(static_cast<std::size_t>(m));
        // odometer over candidate tuples with pick[j] in [start[j], n_j]
        for (int j = 0; j < m; ++j) pick[static_cast<std::size_t>(j)] = start[static_cast<std::size_t>(j)];
        bool any = true;
        for (int j = 0; j < m; ++j)
            any = any && pick[static_cast<std::size_t>(j)] <= lengths[static_cast<std::size_t>(j)];
        if (!any) return 0;
        while (true) {
            for (int j = 0; j < m; ++j)
                tuple[static_cast<std::size_t>(j)] =
                    instance.sequences[static_cast<std::size_t>(j)]
                                      [static_cast<std::size_t>(pick[static_cast<std::size_t>(j)] - 1)];
            const score_t s = model.lookup(tuple);
            for (int j = 0; j < m; ++j) next[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j)] + 1;
            best = std::max(best, s + self(self, next));
            int j = m - 1;
            for (; j >= 0; --j) {
                if (++pick[static_cast<std::size_t>(j)] <= lengths[static_cast<std::size_t>(j)]) break;
                pick[static_cast<std::size_t>(j)] = start[static_cast<std::size_t>(j)];
            }
            if (j < 0) break;
        }
        return best;
    };
    std::vector<int> start(static_cast<std::size_t>(m), 1);
    for (int n : lengths)
        if (n == 0) return 0;
    return rec(rec, start);
}

Band Band::whole_lattice(int m) {
    Band b;
    b.lo_slope.assign(static_cast<std::size_t>(m - 1), 0.0);
    b.lo_offset.assign(static_cast<std::size_t>(m - 1), 1e18);
    b.hi_slope.assign(static_cast<std::size_t>(m - 1), 0.0);
    b.hi_offset.assign(static_cast<std::size_t>(m - 1), 1e18);
    return b;
}

Band Band::diagonal(int m, double p1, double p2, double margin) {
    Band b;
    b.lo_slope.assign(static_cast<std::size_t>(m - 1), p1);
    b.lo_offset.assign(static_cast<std::size_t>(m - 1), p1 * margin);
    b.hi_slope.assign(static_cast<std::size_t>(m - 1), p2);
    b.hi_offset.assign(static_cast<std::size_t>(m - 1), p2 * margin);
    return b;
}

BandedResult align_banded(const Instance& instance, const ScoreModel& model, const Band& band,
                          const AlignBudget& budget) {
    const int m = instance.arity();
    if (m != model.arity())
        throw Error(Errc::ArityMismatch, "instance arity does not match score model");
    if (static_cast<int>(band.lo_slope.size()) != m - 1 ||
        static_cast<int>(band.hi_slope.size()) != m - 1 ||
        static_cast<int>(band.lo_offset.size()) != m - 1 ||
        static_cast<int>(band.hi_offset.size()) != m - 1)
        throw Error(Errc::BadConfig, "band envelope arity mismatch");
    instance.validate(model.alphabet());

    BandBounds bounds;
    bounds.active = true;
    bounds.band = &band;
    bounds.lengths = instance.lengths();
    const int n0 = bounds.lengths[0];
    for (int j = 1; j < m; ++j)
        for (int i0 : {0, n0})
            if (bounds.lo_raw(j, i0) > bounds.hi_raw(j, i0) + 1e-9)
                throw Error(Errc::EmptyBand, "lower envelope exceeds upper envelope");

    for (const auto& seq : instance.sequences)
        if (seq.empty()) {
            BandedResult r;
            r.result.path.emplace();
            r.certified = true;
            return r;
        }

    DpOutcome out = align_general(instance, model, true, bounds, budget);
    BandedResult r;
    r.result.score = out.score;
    r.result.stats = out.stats;
    r.result.path = std::move(out.path);
    r.certified = !out.touched_boundary;
    return r;
}

} // namespace malign
