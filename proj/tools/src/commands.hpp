#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace apery::cli {

enum ExitCode { ok = 0, usage = 2, pipeline = 3, io = 4 };

/// Parses and runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apery::cli
