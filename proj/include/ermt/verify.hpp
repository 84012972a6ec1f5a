#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ermt::verify {

struct Options {
  std::uint64_t seed = 20260101;
  unsigned threads = 0;
};

struct Result {
  int id = 0;
  std::string title;
  bool pass = true;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> failures;  // violated invariant and grid point
  std::map<std::string, double> tolerances;

  void fail(std::string what);
};

// "exact" (1-5, 7, 10), "bounds" (6), "mc" (8, 9), "all", or a comma list of
// criterion numbers. Throws std::invalid_argument on anything else.
std::vector<int> suite(const std::string& name);

// Runs one acceptance criterion (1..10). Deterministic given the options'
// seed; the worker count never changes the result.
Result run(int id, const Options& options);

std::string to_csv(const Result& result);

}  // namespace ermt::verify
