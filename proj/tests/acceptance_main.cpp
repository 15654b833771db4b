#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "allelo/acceptance.hpp"

// Runs the verification suite; one [PASS]/[FAIL] line per criterion.
// Usage: acceptance [--only id...] [--workers n] [--out dir] [--seed s]
int main(int argc, char** argv) {
  allelo::AcceptanceOptions opts;
  opts.out_dir = "accept_out";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--only") {
      while (i + 1 < argc && argv[i + 1][0] != '-')
        opts.only.push_back(std::atoi(argv[++i]));
    } else if (arg == "--workers" && i + 1 < argc) {
      opts.workers = std::atoi(argv[++i]);
    } else if (arg == "--out" && i + 1 < argc) {
      opts.out_dir = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
      return 2;
    }
  }
  auto results = allelo::run_acceptance(opts);
  if (results.empty()) {
    std::fprintf(stderr, "no criteria selected\n");
    return 2;
  }
  return allelo::report_acceptance(results) ? 0 : 1;
}
