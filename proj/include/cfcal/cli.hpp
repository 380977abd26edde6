#pragma once

#include <string>
#include <vector>

namespace cfcal::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a domain or validation
/// error (one `error: <kind>: <message>` line on stderr) and 2 on a usage
/// error.
int cli_dispatch(const std::vector<std::string>& args);
int cli_dispatch(int argc, char** argv);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace cfcal::cli
