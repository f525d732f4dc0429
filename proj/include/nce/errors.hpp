#pragma once

#include <stdexcept>
#include <string>

namespace nce {

// Exit-code contract: schema violations exit 2, numerical guards exit 3,
// internal invariant failures exit 4.

class schema_error : public std::runtime_error {
 public:
  explicit schema_error(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 2;
};

class guard_error : public std::runtime_error {
 public:
  explicit guard_error(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 3;
};

class invariant_error : public std::runtime_error {
 public:
  explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 4;
};

}  // namespace nce
