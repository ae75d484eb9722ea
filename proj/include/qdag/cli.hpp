#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdag {

/// Entry point of the `qdag` tool. `args` excludes the program name.
/// Returns the process exit status; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Fixed formatting used for every probability the tool prints.
std::string format_probability(double p);

}  // namespace qdag
