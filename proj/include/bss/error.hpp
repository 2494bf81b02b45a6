#pragma once

#include <stdexcept>
#include <string>

namespace bss {

/// Failure categories. Each maps to a distinct CLI exit code.
enum class ErrorKind {
    config,           ///< unreadable or malformed input file
    invalid_params,   ///< parameters fail model validation
    resource_limit,   ///< state-space size above the configured cap
    not_a_member,     ///< state vector outside the constrained state space
    out_of_range,     ///< rank or index outside its valid range
    absorbing_state,  ///< a state with zero total exit rate
    singular,         ///< linear system without a unique solution
    non_convergence,  ///< iterative solver hit its iteration cap
    degenerate,       ///< e.g. normalization constant equal to zero
    regime,           ///< operation not valid in the current regime
    mismatched_space, ///< distributions over different state spaces
    io,               ///< write failures
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bss
