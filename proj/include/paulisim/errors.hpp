#pragma once

#include <stdexcept>
#include <string>

namespace paulisim {

// Malformed or inconsistent user input (files, CLI flags, state specs).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A resource guard tripped (term-count cap, qubit cap, order cap).
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// A statistically unsafe result was refused (e.g. dividing by an estimate
// whose confidence interval contains zero).
class RefusalError : public std::runtime_error {
 public:
  explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

// Process exit codes used by the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitRefusal = 4;

}  // namespace paulisim
