#pragma once

// Command-line front end. Exit codes: 0 success, 2 input/usage error,
// 3 internal invariant violation.

#include <string>
#include <vector>

namespace rugged::cli {

int run(const std::vector<std::string>& args);  // args exclude argv[0]
int run(int argc, const char* const* argv);

}  // namespace rugged::cli
