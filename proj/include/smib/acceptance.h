#pragma once
// The regression gate: re-derives every headline quantity from the given
// configuration and checks it against its pinned expectation, one PASS/FAIL
// line per check (measured, expected, tolerance).  Returns false when any
// check failed; callers map that to exit code 4.

#include <iosfwd>

#include "smib/config.h"

namespace smib {

bool run_acceptance(const Config& cfg, std::ostream& os);

}  // namespace smib
