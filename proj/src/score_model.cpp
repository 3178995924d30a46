#include "malign/score_model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace malign {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonSymmetric: return "NonSymmetric";
        case Errc::Negative: return "Negative";
        case Errc::Trivial: return "Trivial";
        case Errc::ScaleOverflow: return "ScaleOverflow";
        case Errc::OutOfAlphabet: return "OutOfAlphabet";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::ArityMismatch: return "ArityMismatch";
        case Errc::TooLarge: return "TooLarge";
        case Errc::NotDivisible: return "NotDivisible";
        case Errc::NotOptimalPath: return "NotOptimalPath";
        case Errc::EmptyBand: return "EmptyBand";
        case Errc::DegenerateVariance: return "DegenerateVariance";
        case Errc::BadSimplexPoint: return "BadSimplexPoint";
        case Errc::NotPermutation: return "NotPermutation";
        case Errc::NonSquare: return "NonSquare";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::IoError: return "IoError";
        case Errc::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

std::size_t ScoreModel::index_of(std::span<const int> tuple) const {
    if (static_cast<int>(tuple.size()) != m_)
        throw Error(Errc::ArityMismatch, "tuple arity does not match model");
    std::size_t idx = 0;
    for (int s : tuple) {
        if (s < 0 || s >= alphabet_.size)
            throw Error(Errc::OutOfAlphabet, "symbol " + std::to_string(s) + " out of range");
        idx = idx * static_cast<std::size_t>(alphabet_.size) + static_cast<std::size_t>(s);
    }
    return idx;
}

score_t ScoreModel::lookup(std::span<const int> tuple) const { return table_[index_of(tuple)]; }

score_t score_lookup(const ScoreModel& model, std::span<const int> tuple) {
    return model.lookup(tuple);
}

namespace {

score_t to_fixed(const Rational& r, score_t scale) {
    if (r.den == 0) throw Error(Errc::BadConfig, "zero denominator");
    std::int64_t num = r.num, den = r.den;
    if (den < 0) { num = -num; den = -den; }
    const __int128 scaled = static_cast<__int128>(num) * scale;
    if (scaled % den != 0)
        throw Error(Errc::ScaleOverflow, "score " + std::to_string(r.num) + "/" +
                                             std::to_string(r.den) +
                                             " not representable at scale " + std::to_string(scale));
    const __int128 v = scaled / den;
    if (v > INT64_MAX / 4 || v < INT64_MIN / 4)
        throw Error(Errc::ScaleOverflow, "score magnitude too large for fixed point");
    return static_cast<score_t>(v);
}

} // namespace

ScoreModel build_score_model(const Alphabet& alphabet, int m, const std::vector<ScoreEntry>& entries,
                             score_t scale) {
    alphabet.validate();
    if (m < 1) throw Error(Errc::BadConfig, "arity must be >= 1");
    if (scale < 1 || (scale & (scale - 1)) != 0)
        throw Error(Errc::BadConfig, "scale must be a positive power of two");

    const auto k = static_cast<std::uint64_t>(alphabet.size);
    std::uint64_t table_size = 1;
    for (int j = 0; j < m; ++j) {
        if (table_size > ScoreModel::kMaxTableEntries / k)
            throw Error(Errc::TooLarge, "|A|^m exceeds dense table cap");
        table_size *= k;
    }

    ScoreModel model;
    model.alphabet_ = alphabet;
    model.m_ = m;
    model.scale_ = scale;
    model.table_.assign(table_size, 0);
    std::vector<char> set(table_size, 0);

    std::vector<int> perm(static_cast<std::size_t>(m));
    for (const ScoreEntry& e : entries) {
        if (static_cast<int>(e.tuple.size()) != m)
            throw Error(Errc::ArityMismatch, "entry tuple arity does not match m");
        const score_t value = to_fixed(e.value, scale);
        if (value < 0) throw Error(Errc::Negative, "score entries must be non-negative");
        // Expand the full permutation orbit of the tuple.
        std::vector<int> sorted = e.tuple;
        std::sort(sorted.begin(), sorted.end());
        perm = sorted;
        do {
            const std::size_t idx = model.index_of(perm);
            if (set[idx] && model.table_[idx] != value)
                throw Error(Errc::NonSymmetric,
                            "conflicting scores for permutation-equivalent tuples");
            model.table_[idx] = value;
            set[idx] = 1;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    model.s_star_ = *std::max_element(model.table_.begin(), model.table_.end());
    if (model.s_star_ == 0) throw Error(Errc::Trivial, "all scores are zero");

    // D_j by exhaustive scan over A^m x single-coordinate changes.
    model.d_coords_.assign(static_cast<std::size_t>(m), 0);
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    for (std::uint64_t idx = 0; idx < table_size; ++idx) {
        std::uint64_t rest = idx;
        for (int j = m - 1; j >= 0; --j) {
            tuple[static_cast<std::size_t>(j)] = static_cast<int>(rest % k);
            rest /= k;
        }
        std::uint64_t stride = 1;
        for (int j = m - 1; j >= 0; --j) {
            const int cur = tuple[static_cast<std::size_t>(j)];
            const std::uint64_t base = idx - static_cast<std::uint64_t>(cur) * stride;
            for (int s = 0; s < alphabet.size; ++s) {
                const score_t diff =
                    std::abs(model.table_[idx] - model.table_[base + static_cast<std::uint64_t>(s) * stride]);
                auto& dj = model.d_coords_[static_cast<std::size_t>(j)];
                dj = std::max(dj, diff);
            }
            stride *= k;
        }
    }
    model.d_max_ = *std::max_element(model.d_coords_.begin(), model.d_coords_.end());
    // Permutation invariance forces all D_j equal.
    for (score_t dj : model.d_coords_)
        if (dj != model.d_max_)
            throw Error(Errc::NonSymmetric, "per-coordinate difference constants disagree");
    return model;
}

ScoreModel lcs_indicator_model(int alphabet_size, int m) {
    std::vector<ScoreEntry> entries;
    for (int s = 0; s < alphabet_size; ++s)
        entries.push_back({std::vector<int>(static_cast<std::size_t>(m), s), {1, 1}});
    return build_score_model(Alphabet{alphabet_size}, m, entries, 1);
}

void SequenceDistribution::validate(const Alphabet& alphabet) const {
    constexpr double kTol = 1.0 / 4294967296.0; // 2^-32
    if (probs.empty()) throw Error(Errc::BadConfig, "empty distribution");
    for (const auto& p : probs) {
        if (static_cast<int>(p.size()) != alphabet.size)
            throw Error(Errc::BadConfig, "distribution length does not match alphabet");
        double sum = 0.0;
        for (double x : p) {
            if (x < 0.0) throw Error(Errc::BadConfig, "negative probability");
            sum += x;
        }
        if (std::abs(sum - 1.0) > kTol)
            throw Error(Errc::BadConfig, "probabilities do not sum to 1");
    }
}

SequenceDistribution SequenceDistribution::uniform(int alphabet_size, int m) {
    SequenceDistribution d;
    d.probs.assign(static_cast<std::size_t>(m),
                   std::vector<double>(static_cast<std::size_t>(alphabet_size),
                                       1.0 / alphabet_size));
    return d;
}

ScoreModel load_score_model_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Errc::IoError, std::string("bad model JSON: ") + e.what());
    }
    const int k = j.at("alphabet").get<int>();
    const int m = j.at("m").get<int>();
    const score_t scale = j.value("scale", ScoreModel::kDefaultScale);
    std::vector<ScoreEntry> entries;
    for (const auto& e : j.at("entries")) {
        ScoreEntry entry;
        entry.tuple = e.at("tuple").get<std::vector<int>>();
        entry.value.num = e.at("num").get<std::int64_t>();
        entry.value.den = e.value("den", std::int64_t{1});
        entries.push_back(std::move(entry));
    }
    return build_score_model(Alphabet{k}, m, entries, scale);
}

ScoreModel load_score_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_score_model_json(ss.str());
}

std::string score_to_rational_string(score_t raw, score_t scale) {
    const bool neg = raw < 0;
    std::int64_t num = neg ? -raw : raw;
    std::int64_t den = scale;
    const std::int64_t g = std::gcd(num, den);
    if (g > 0) { num /= g; den /= g; }
    std::string s = (neg ? "-" : "") + std::to_string(num);
    if (den != 1) s += "/" + std::to_string(den);
    return s;
}

} // namespace malign
