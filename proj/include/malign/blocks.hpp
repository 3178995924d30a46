#ifndef MALIGN_BLOCKS_HPP
#define MALIGN_BLOCKS_HPP

#include <vector>

#include "malign/aligner.hpp"

namespace malign {

/// Index range [first, last], 1-based; empty when last < first.
struct IndexRange {
    int first = 1;
    int last = 0;
    int width() const { return last - first + 1 > 0 ? last - first + 1 : 0; }
};

/// Decomposition of a canonical optimal alignment into cells along blocks of
/// sequence 1.
struct BlockDecomposition {
    int v = 0;
    int d = 0;
    /// breakpoints[j-2] is the vector (r_0, ..., r_d) for sequence j=2..m.
    std::vector<std::vector<int>> breakpoints;
    /// cells[k][j] is the index range of sequence j+1 inside cell k+1.
    std::vector<std::vector<IndexRange>> cells;

    std::vector<int> widths(int j) const; // widths r_k - r_{k-1} for sequence j=2..m
};

struct DiagonalConfig {
    std::vector<double> p_lo, p_hi; // one entry per sequence j=2..m
    double epsilon = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    double c1 = 1.0;
    double delta_star = 0.0;

    void validate(int m) const;
};

/// Breakpoints from the canonical path: r_k^(j) is the largest index of
/// sequence j aligned at a sequence-1 position <= v*k, carried forward over
/// empty blocks; cell additivity is re-verified by re-solving every cell.
BlockDecomposition decompose_cells(const std::vector<PathTuple>& path, const Instance& instance,
                                   const ScoreModel& model, int v);

struct EEventResult {
    bool holds = false;
    double good_fraction = 0.0;
};

/// Fraction of cells whose widths lie in [v*p_lo_j, v*p_hi_j] for all j;
/// holds when that fraction is at least 1 - epsilon.
EEventResult check_E_event(const BlockDecomposition& decomp, const DiagonalConfig& cfg);

/// True iff every aligned tuple stays inside the affine parallelepiped
/// p_j^(1)*x_1 - p_j^(1)*(n*eps + v) <= x_j <= p_j^(2)*x_1 + p_j^(2)*(n*eps + v).
bool check_D_event(const std::vector<PathTuple>& path, int n, const DiagonalConfig& cfg, int v);

/// eps = c1 * sqrt((1 + ln(n^alpha + 1)) / n^alpha).
double epsilon_schedule(double n, double alpha, double c1);

} // namespace malign

#endif
