// Entry point of the planverify command line tool, callable in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace planverify::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // usage, configuration or I/O error
  kTranslationFailed = 2,
  kBackendUnreachable = 3,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace planverify::cli
