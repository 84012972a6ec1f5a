#pragma once

#include <string>
#include <vector>

namespace ermt::cli {

// Exit codes: 0 success, 1 usage error, 2 validation failure (bad input or
// a failed check).
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

// "a:b:step", "x,y,z" or a single value.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace ermt::cli
