#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace laros::cli {

/// Runs one command line (without the program name). Results go to `out`
/// or the --output file, diagnostics to `err`. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

const char* tool_version();

}  // namespace laros::cli
