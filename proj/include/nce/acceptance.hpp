#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nce::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full acceptance suite (or the listed criterion ids), printing one
/// pass/fail line per criterion. Returns true when every criterion passes.
bool run(std::ostream& out, const std::vector<int>& only = {});

}  // namespace nce::acceptance
