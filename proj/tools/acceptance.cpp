// Runs the numbered acceptance criteria and prints one PASS/FAIL line each.
// Exit status 0 iff every criterion passes.

#include <iostream>
#include <sstream>

#include "sqt/checks.hpp"

int main() {
  bool all = true;
  for (const auto& run : sqt::acceptance_criteria()) {
    sqt::Criterion c;
    try {
      c = run();
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion ?: aborted: " << e.what() << std::endl;
      all = false;
      continue;
    }
    std::ostringstream detail;
    for (std::size_t i = 0; i < c.checks.size(); ++i) {
      const auto& k = c.checks[i];
      detail << (i ? "; " : "") << k.name << "=" << sqt::format17(k.measured) << " " << k.tolerance_text()
             << (k.pass ? "" : " FAILED");
    }
    std::cout << (c.pass() ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " " << c.title << " ("
              << sqt::detail::format_seconds(c.seconds) << "): " << detail.str() << std::endl;
    all = all && c.pass();
  }
  return all ? 0 : 1;
}
