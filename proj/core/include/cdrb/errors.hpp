#pragma once

#include <stdexcept>
#include <string>

namespace cdrb {

// Bad configuration, invalid arguments, or violated call contracts.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing, unreadable, or format/version-mismatched files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or otherwise unusable numerics.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No feasible path/plan exists, or a controller failed to reach its goal.
struct PlanningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cdrb
