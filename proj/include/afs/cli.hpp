// Command-line entry point, callable in-process for tests.
// Exit codes: 0 pass, 1 checked failure, 2 usage/config error, 3 internal error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace afs {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afs
