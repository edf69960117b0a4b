#pragma once

#include <iosfwd>

namespace alq {

/// Entry point of the `alq` tool. Returns the process exit code: 0 on
/// success, 1 for bad input, 2 when an invariant or bound check fails and
/// 3 for file system errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alq
