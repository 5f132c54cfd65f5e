#pragma once

#include <iosfwd>

namespace selinf::cli {

/// Runs the oracle comparisons and writes "check,status,detail" CSV rows.
/// Returns true when every check passes.
bool run_selfcheck(std::ostream& out);

}  // namespace selinf::cli
