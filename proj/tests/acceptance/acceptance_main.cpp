// Acceptance suite: runs every acceptance criterion at full size and prints
// one PASS/FAIL line per criterion.
//
//   shs_acceptance                 all criteria
//   shs_acceptance --criterion 4   a single criterion
//   shs_acceptance --threads 4     worker threads for experiment-driven checks

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "shs/selftest.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  shs::SelftestOptions opts;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      ids.push_back(std::atoi(argv[++a]));
    } else if (std::strcmp(argv[a], "--threads") == 0 && a + 1 < argc) {
      opts.threads = static_cast<unsigned>(std::max(1, std::atoi(argv[++a])));
    } else {
      std::cerr << "usage: " << argv[0] << " [--criterion N]... [--threads K]\n";
      return 2;
    }
  }
  if (ids.empty()) {
    for (int id = 1; id <= shs::kCheckCount; ++id) ids.push_back(id);
  }

  int failed = 0;
  for (int id : ids) {
    if (id < 1 || id > shs::kCheckCount) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto r = shs::run_check(id, opts);
    std::cout << "criterion " << r.id << " " << (r.passed ? "PASS" : "FAIL") << "  " << r.name
              << "  [" << r.seconds << " s";
    if (r.time_limit > 0.0) std::cout << " / limit " << r.time_limit << " s";
    std::cout << "]" << r.detail << std::endl;
    failed += r.passed ? 0 : 1;
  }
  std::cout << (ids.size() - static_cast<std::size_t>(failed)) << "/" << ids.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
