#pragma once

#include <stdexcept>
#include <string>

namespace resgap {

// Error categories double as CLI exit codes.
enum class ErrorCategory : int {
    validation = 2,      // rejected input or violated precondition
    infeasible = 3,      // design cannot be realized with the requested parameters
    no_convergence = 4,  // iterative eigensolver exhausted its budget
    invariant = 5,       // internal invariant breached; should be unreachable
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

#define RESGAP_DEFINE_ERROR(NAME, CATEGORY)                    \
    struct NAME : Error {                                      \
        explicit NAME(const std::string& what)                 \
            : Error(ErrorCategory::CATEGORY, what) {}          \
    }

RESGAP_DEFINE_ERROR(ValidationError, validation);
RESGAP_DEFINE_ERROR(DuplicateAlpha, validation);
RESGAP_DEFINE_ERROR(PoleEvaluation, validation);
RESGAP_DEFINE_ERROR(UnresolvedPassage, validation);
RESGAP_DEFINE_ERROR(PassageExceedsClearance, validation);

RESGAP_DEFINE_ERROR(InfeasibleLayout, infeasible);
RESGAP_DEFINE_ERROR(GammaTooLarge, infeasible);

RESGAP_DEFINE_ERROR(RootNotBracketed, invariant);
RESGAP_DEFINE_ERROR(NonPositiveRho, invariant);
RESGAP_DEFINE_ERROR(SingularSystem, invariant);
RESGAP_DEFINE_ERROR(RoundtripMismatch, invariant);
RESGAP_DEFINE_ERROR(BracketingViolation, invariant);

#undef RESGAP_DEFINE_ERROR

// Thrown by the eigensolver when the iteration cap is hit; carries the best
// residual reached so the caller can report how far off it was.
struct NoConvergence : Error {
    NoConvergence(const std::string& what, double best)
        : Error(ErrorCategory::no_convergence, what), best_residual(best) {}
    double best_residual;
};

}  // namespace resgap
