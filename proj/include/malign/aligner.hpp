#ifndef MALIGN_ALIGNER_HPP
#define MALIGN_ALIGNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "malign/score_model.hpp"

namespace malign {

/// m symbol vectors, possibly of unequal lengths.
struct Instance {
    std::vector<std::vector<int>> sequences;

    int arity() const { return static_cast<int>(sequences.size()); }
    std::vector<int> lengths() const;
    void validate(const Alphabet& alphabet) const;
};

struct SolverStats {
    std::uint64_t cells_visited = 0;
    std::uint64_t peak_memory_cells = 0;
};

/// An aligned tuple holds one 1-based index per sequence.
using PathTuple = std::vector<int>;

struct AlignmentResult {
    score_t score = 0;
    std::optional<std::vector<PathTuple>> path;
    SolverStats stats;
};

struct AlignBudget {
    std::uint64_t score_only_cells = 200'000'000ull;
    std::uint64_t with_path_cells = 50'000'000ull;
};

/// Exact optimal alignment score by dynamic programming over the full lattice.
/// With want_path, also returns the canonical optimal path (deterministic
/// tie-breaking: prefer the diagonal move when its tuple scores > 0, otherwise
/// decrement the smallest coordinate whose skip is optimal).
AlignmentResult align_exact(const Instance& instance, const ScoreModel& model, bool want_path,
                            const AlignBudget& budget = {});

/// Direct enumeration of the alignment definition; the oracle for align_exact.
/// Restricted to n_j <= 8 and m <= 3.
score_t brute_force_score(const Instance& instance, const ScoreModel& model);

/// Affine band envelopes: for j=2..m, x_j in [lo_slope*x_1 - lo_offset,
/// hi_slope*x_1 + hi_offset]. Vectors are indexed by j-2.
struct Band {
    std::vector<double> lo_slope, lo_offset, hi_slope, hi_offset;

    static Band whole_lattice(int m);
    /// The parallelepiped envelope with slopes p1/p2 and margin n*eps + v.
    static Band diagonal(int m, double p1, double p2, double margin);
};

struct BandedResult {
    AlignmentResult result;
    /// True iff the canonical banded path never touches a band boundary cell,
    /// in which case the score equals align_exact; otherwise the score is only
    /// a lower bound.
    bool certified = false;
};

BandedResult align_banded(const Instance& instance, const ScoreModel& model, const Band& band,
                          const AlignBudget& budget = {});

} // namespace malign

#endif
