#pragma once

#include <stdexcept>
#include <string>

namespace lakevortex {

/// Bad user input: malformed config file, invalid lake/blob parameters.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Linear solver did not meet its residual contract.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A particle left the valid region (escaped the mask, tripped the
/// shore guard, or entered a foreign vortex neighbourhood).
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Level-set separation failure modes. `Overlap` is the hard error the
/// multi-vortex setup must reject; `BoundaryContact` marks lakes whose level
/// bands structurally touch the shore (constant depth, affine depth on a
/// rectangle) and is recoverable by the scenario runner.
struct SeparationError : std::runtime_error {
    enum class Kind { Overlap, BoundaryContact };
    Kind kind;
    SeparationError(Kind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

}  // namespace lakevortex
