#pragma once

#include <iosfwd>

namespace esdp {

/// Runs the esdp command line. Returns 0 on success, 1 on domain errors and
/// 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in);

} // namespace esdp
