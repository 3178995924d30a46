#ifndef MALIGN_ERRORS_HPP
#define MALIGN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace malign {

enum class Errc {
    NonSymmetric,
    Negative,
    Trivial,
    ScaleOverflow,
    OutOfAlphabet,
    BudgetExceeded,
    ArityMismatch,
    TooLarge,
    NotDivisible,
    NotOptimalPath,
    EmptyBand,
    DegenerateVariance,
    BadSimplexPoint,
    NotPermutation,
    NonSquare,
    IndexOutOfRange,
    IoError,
    BadConfig,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

    /// Budget errors map to exit code 3, everything else to 2.
    bool is_budget() const { return code_ == Errc::BudgetExceeded || code_ == Errc::TooLarge; }

private:
    Errc code_;
};

} // namespace malign

#endif
