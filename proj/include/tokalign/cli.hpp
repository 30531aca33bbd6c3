#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tokalign::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kDeadEnd = 3 };

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

int main(int argc, char** argv);

}  // namespace tokalign::cli
