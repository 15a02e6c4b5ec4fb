#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace coimpact {

inline constexpr std::string_view kVersion = "0.1.0";

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Runs one subcommand. `args` excludes the program name. Data goes to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes. Throws ConfigError when it cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace coimpact
