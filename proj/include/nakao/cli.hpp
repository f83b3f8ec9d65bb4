#pragma once

// Subcommand dispatcher behind the `nakao` executable.
//
// Every subcommand resolves its configuration as defaults <- --config file <- flags,
// writes <out>.csv (and <out>.svg for region/curves) and <out>.json holding the
// resolved config and the results. Exit codes: 0 ok, 1 I/O failure, 2 invalid
// config or flags, 3 inconclusive sweep.

#include <iosfwd>
#include <string>
#include <vector>

namespace nakao {

/// Arguments without the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

/// Default config of a subcommand as pretty-printed JSON. Throws
/// std::invalid_argument for unknown subcommands.
std::string default_config(const std::string& subcommand);

}  // namespace nakao
