#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scenopt::cli {

/**
 * Runs one CLI invocation (args exclude the program name) and returns the
 * process exit status: 0 on success, 1 on I/O failure, 2 on parameter
 * validation failure. Subcommands: bounds, sphere, opf.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace scenopt::cli
