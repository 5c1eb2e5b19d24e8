#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ndkit {

/// Raised when an operation is called outside the domain its formula or
/// model is defined on (zero duty cycle, non-periodic schedule, ...).
struct DomainError : public std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A schedule document could not be turned into a ProtocolSpec.
struct ParseError : public std::runtime_error {
    ParseError(const std::string& what, std::vector<std::string> diagnostics = {})
        : std::runtime_error(what), diagnostics(std::move(diagnostics)) {}

    std::vector<std::string> diagnostics;
};

/// No correlated beacon plan exists for the requested template and anchor.
struct ConstructionError : public std::runtime_error {
    explicit ConstructionError(const std::string& what,
                               std::vector<std::pair<std::int64_t, std::int64_t>> residual = {})
        : std::runtime_error(what), residual(std::move(residual)) {}

    /// Half-open tick ranges left uncovered by the best partial plan.
    std::vector<std::pair<std::int64_t, std::int64_t>> residual;
};

/// No redundancy level satisfies the duty-cycle budget.
struct InfeasibleError : public std::runtime_error {
    InfeasibleError(const std::string& what, std::vector<std::string> reasons)
        : std::runtime_error(what), reasons(std::move(reasons)) {}

    std::vector<std::string> reasons;
};

}  // namespace ndkit
