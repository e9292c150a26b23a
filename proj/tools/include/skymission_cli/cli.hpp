#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace skymission::cli {

enum ExitCode { kOk = 0, kDiagnostics = 1, kUsage = 2, kIo = 3 };

/// Runs one command line (arguments after the program name) and returns
/// the process exit code. Diagnostics and results go to `out`, usage and
/// I/O errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skymission::cli
