#ifndef MALIGN_SCORE_MODEL_HPP
#define MALIGN_SCORE_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "malign/errors.hpp"

namespace malign {

/// Scores are fixed-point integers: a raw value `r` represents r / scale.
using score_t = std::int64_t;

struct Alphabet {
    int size = 0; // symbol ids are 0..size-1

    void validate() const {
        if (size < 1) throw Error(Errc::BadConfig, "alphabet size must be >= 1");
    }
};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

/// One table entry given to the builder: an m-tuple of symbols and its score.
struct ScoreEntry {
    std::vector<int> tuple;
    Rational value;
};

/// Bounded, non-negative, permutation-invariant score function on A^m,
/// stored densely with exact fixed-point values.
class ScoreModel {
public:
    static constexpr score_t kDefaultScale = 1 << 16;
    static constexpr std::uint64_t kMaxTableEntries = 1u << 24;

    int alphabet_size() const { return alphabet_.size; }
    const Alphabet& alphabet() const { return alphabet_; }
    int arity() const { return m_; }
    score_t scale() const { return scale_; }
    score_t s_star() const { return s_star_; }
    const std::vector<score_t>& d_coords() const { return d_coords_; }
    score_t d_max() const { return d_max_; }
    const std::vector<score_t>& table() const { return table_; }

    /// Flat mixed-radix index of an m-tuple; symbols must be in range.
    std::size_t index_of(std::span<const int> tuple) const;

    score_t lookup(std::span<const int> tuple) const;
    score_t lookup_flat(std::size_t idx) const { return table_[idx]; }

    friend ScoreModel build_score_model(const Alphabet&, int, const std::vector<ScoreEntry>&,
                                        score_t);

private:
    Alphabet alphabet_;
    int m_ = 0;
    score_t scale_ = kDefaultScale;
    std::vector<score_t> table_;
    score_t s_star_ = 0;
    std::vector<score_t> d_coords_;
    score_t d_max_ = 0;
};

/// Validates, symmetrizes each entry over its permutation orbit, and computes
/// s*, D_j by exhaustive scan. Unspecified tuples default to 0.
ScoreModel build_score_model(const Alphabet& alphabet, int m, const std::vector<ScoreEntry>& entries,
                             score_t scale = ScoreModel::kDefaultScale);

score_t score_lookup(const ScoreModel& model, std::span<const int> tuple);

/// Indicator score: 1 iff all m symbols are equal (the LCS score function).
ScoreModel lcs_indicator_model(int alphabet_size, int m);

/// Per-sequence letter distributions; sequences may have different marginals.
struct SequenceDistribution {
    std::vector<std::vector<double>> probs; // one vector per sequence, each over the alphabet

    void validate(const Alphabet& alphabet) const;
    static SequenceDistribution uniform(int alphabet_size, int m);
};

/// Parses {"alphabet": k, "m": m, "scale": s, "entries": [{"tuple": [...], "num": p, "den": q}]}.
ScoreModel load_score_model_json(const std::string& text);
ScoreModel load_score_model_file(const std::string& path);

std::string score_to_rational_string(score_t raw, score_t scale);

} // namespace malign

#endif
