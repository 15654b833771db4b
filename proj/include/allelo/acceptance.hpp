#ifndef ALLELO_ACCEPTANCE_HPP
#define ALLELO_ACCEPTANCE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace allelo {

// Verification suite: each check runs a pinned scenario at a pinned
// tolerance and writes its primary numbers under out_dir, so reruns can be
// compared byte for byte.

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: all checks
  int workers = 0;        // 0: hardware concurrency
  std::filesystem::path out_dir = "accept_out";
  std::uint64_t seed = 20240801;
};

std::vector<int> acceptance_ids();
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// Prints one [PASS]/[FAIL] line per criterion; returns true if all passed.
bool report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace allelo

#endif
