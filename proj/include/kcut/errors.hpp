// errors.hpp — error taxonomy shared by all kcut modules.

#pragma once

#include <stdexcept>
#include <string>

namespace kcut {

enum class ErrorCode {
    invalid_parameter,
    inconsistent_derivatives,
    out_of_range,
    no_convergence,
    domain_violation,
    numeric_failure,
    not_kahler_here,
    malformed_form,
    dimension_error,
    outside_cut_region,
    not_semistable,
    level_solve_failure,
    regularity_violation,
    invalid_level,
    misconfigured,
    not_einstein_ambient,
    outside_polytope,
    too_large,
    unsupported,
    inconclusive,
    io_error,
    config_error,
};

inline const char* error_code_name(ErrorCode c)
{
    switch (c) {
        case ErrorCode::invalid_parameter:        return "invalid-parameter";
        case ErrorCode::inconsistent_derivatives: return "inconsistent-derivatives";
        case ErrorCode::out_of_range:             return "out-of-range";
        case ErrorCode::no_convergence:           return "no-convergence";
        case ErrorCode::domain_violation:         return "domain-violation";
        case ErrorCode::numeric_failure:          return "numeric-failure";
        case ErrorCode::not_kahler_here:          return "not-kahler-here";
        case ErrorCode::malformed_form:           return "malformed-form";
        case ErrorCode::dimension_error:          return "dimension-error";
        case ErrorCode::outside_cut_region:       return "outside-cut-region";
        case ErrorCode::not_semistable:           return "not-semistable";
        case ErrorCode::level_solve_failure:      return "level-solve-failure";
        case ErrorCode::regularity_violation:     return "regularity-violation";
        case ErrorCode::invalid_level:            return "invalid-level";
        case ErrorCode::misconfigured:            return "misconfigured";
        case ErrorCode::not_einstein_ambient:     return "not-einstein-ambient";
        case ErrorCode::outside_polytope:         return "outside-polytope";
        case ErrorCode::too_large:                return "too-large";
        case ErrorCode::unsupported:              return "unsupported";
        case ErrorCode::inconclusive:             return "inconclusive";
        case ErrorCode::io_error:                 return "io-error";
        case ErrorCode::config_error:             return "config-error";
    }
    return "unknown";
}

// Exception carrying the error kind plus the operation that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string op, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + " in " + op + ": " + what),
          code_(code),
          op_(std::move(op)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& operation() const noexcept { return op_; }

private:
    ErrorCode code_;
    std::string op_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& op, const std::string& what)
{
    throw Error(code, op, what);
}

} // namespace kcut
