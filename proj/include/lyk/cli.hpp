#pragma once

// Command-line front end. Every subcommand writes `#config key = value` lines
// (the resolved configuration, readable again through --config), then one
// record per line, then a single `summary` record.

#include <iosfwd>
#include <map>
#include <string>

namespace lyk::cli {

enum ExitCode { ok = 0, internal = 1, input_error = 2, precision_error = 3 };

/// `key = value` lines; `#config key = value` lines are read as settings and
/// other `#` lines are comments. If any `#config` line is present, every
/// other line is ignored, so a saved output file reads back as its settings.
/// Throws InputError naming the bad line.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Runs the program; output goes to `out` unless --output names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lyk::cli
