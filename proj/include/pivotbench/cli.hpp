#pragma once

#include <iosfwd>

namespace pivotbench {

/// Entry point of the `pivotbench` tool. Returns 0 on success, 2 on a usage
/// error and 1 on a runtime error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pivotbench
