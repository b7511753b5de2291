#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace hypreg::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalFailure = 3 };

using Settings = std::map<std::string, std::string>;

/// Flat `key = value` text; `#` starts a comment. Keys are the long flag
/// names without the leading dashes.
Settings parse_config(const std::string& text, const std::string& source);

/// Entry point behind the `hypreg` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypreg::cli
