// Acceptance suite runner: one pass/fail line per criterion.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "fastesc/selftest.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 12345;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  fastesc::SelftestReport report = fastesc::run_selftest(seed);
  for (const auto& c : report.criteria)
    std::printf("[%s] %2d %-34s (%.2f s)\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.seconds);
  if (!report.all_passed) {
    for (const auto& c : report.criteria)
      if (!c.passed)
        std::printf("detail %d: %s\n", c.id, c.details.dump(2).c_str());
  }
  std::printf("%s (seed %llu)\n", report.all_passed ? "ACCEPTANCE: all criteria passed"
                                                    : "ACCEPTANCE: FAILURES PRESENT",
              static_cast<unsigned long long>(seed));
  return report.all_passed ? 0 : 1;
}
