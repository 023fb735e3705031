#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "chainunify/syntax.hpp"

namespace chainunify {

enum ExitCode : int {
  kExitUnifiable = 0,
  kExitNotUnifiable = 1,
  kExitUsage = 2,
  kExitBudget = 3,
};

/// Positive 3-literal clauses, one per line; blank lines and lines starting
/// with `#` are skipped. Throws FormatError.
std::vector<std::vector<std::string>> parse_clauses(std::string_view text);

/// One gadget equation per clause over element variables x_<name>.
ProblemText encode_1in3(const std::vector<std::vector<std::string>>& clauses);

/// Entry point of the `chainunify` tool; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace chainunify
