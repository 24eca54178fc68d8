// Acceptance criteria, one PASS/FAIL line each; exit status 1 if any fails.
#include <cstdio>

#include "prophet/acceptance.hpp"

int main() {
  bool all = true;
  prophet::acceptance::run_all([&](const prophet::acceptance::Criterion& c) {
    std::printf("%s\n", prophet::acceptance::format_line(c).c_str());
    std::fflush(stdout);
    all = all && c.pass;
  });
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
