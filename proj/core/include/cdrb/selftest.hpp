#pragma once

#include <iosfwd>

namespace cdrb {

// Fast internal consistency checks: finite-difference gradient verification for
// both backbones, kd-tree queries against a linear scan, compression membership,
// and schedule endpoint/monotonicity invariants. Prints one line per check and
// returns true only if every check passes. Designed to finish well under a minute.
bool run_selftest(std::ostream& out);

}  // namespace cdrb
