#pragma once

#include <string>

namespace unrolldiff::verify {

/// Runs one of the named property suites ("identities", "orthogonality",
/// "oracles", "bounds_domination"), printing one pass/fail line per invariant
/// with the measured tolerance.  Returns true when every check passed.
bool run_suite(const std::string& name);

}  // namespace unrolldiff::verify
