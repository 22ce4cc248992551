// One PASS/FAIL line per acceptance criterion. With arguments, runs only the
// named suites. Exit status is nonzero if any criterion fails.

#include <iostream>
#include <string>
#include <vector>

#include "magvirial/verify.hpp"

int main(int argc, char** argv) {
  using namespace magvirial::verify;
  std::vector<std::string> names;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v") {
      verbose = true;
    } else {
      names.push_back(a);
    }
  }
  if (names.empty()) names = suite_names();
  const Options opts = default_options();
  bool ok = true;
  for (const auto& n : names) {
    SuiteResult r;
    try {
      r = run_suite(n, opts);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
    std::cout << summary_line(r) << std::endl;
    if (verbose || !r.pass()) {
      write_table(std::cerr, r);
      for (const auto& row : r.table) std::cerr << "  " << row << '\n';
    }
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}
