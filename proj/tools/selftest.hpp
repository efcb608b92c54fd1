#pragma once

#include <ostream>

namespace qcnnlab {

/// Quick oracle and invariant sweep; prints one line per check and returns
/// true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace qcnnlab
