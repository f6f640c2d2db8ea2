#pragma once

#include <stdexcept>
#include <string>

namespace picardkit {

/// Failure categories. The CLI maps each to a distinct exit code.
enum class ErrorKind {
    invalid_input,
    division_by_zero,
    budget_exceeded,
    undecided,
    no_solution,
    non_integer,
    inconsistent,
    improper_intersection,
    unclassifiable,
    hypothesis_violation,
    rank_mismatch,
    relation_violation,
    certificate_invalid,
    missing_budget,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::undecided: return "undecided";
    case ErrorKind::no_solution: return "no-solution";
    case ErrorKind::non_integer: return "non-integer-coefficients";
    case ErrorKind::inconsistent: return "inconsistent-table";
    case ErrorKind::improper_intersection: return "improper-intersection";
    case ErrorKind::unclassifiable: return "unclassifiable-factor";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::rank_mismatch: return "rank-mismatch";
    case ErrorKind::relation_violation: return "relation-violation";
    case ErrorKind::certificate_invalid: return "certificate-invalid";
    case ErrorKind::missing_budget: return "missing-budget";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The description without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

/// Thrown by the point counter; carries the last tower level that completed.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, unsigned last_completed = 0)
        : Error(ErrorKind::budget_exceeded, what), last_completed_(last_completed) {}

    unsigned last_completed() const noexcept { return last_completed_; }

private:
    unsigned last_completed_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

} // namespace picardkit
