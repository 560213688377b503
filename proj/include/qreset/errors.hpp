#pragma once

#include <stdexcept>
#include <string>

namespace qreset {

// Error taxonomy used across the library. The CLI maps these onto its
// exit codes: ConfigError -> 2, IntegrationError (dynamics.hpp) -> 3,
// InvariantError -> 4.

/// Invalid user-facing input: parameters, protocol definitions, config files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical invariant the library guarantees was violated
/// (normalization drift, positivity breach, inconsistent observables).
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qreset
