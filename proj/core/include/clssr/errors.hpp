#pragma once

#include <stdexcept>
#include <string>

namespace clssr {

// Invalid or ill-formed configuration input (bad JSON, unknown keys,
// out-of-range parameters). Maps to process exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A requested operating point admits no feasible design, e.g. no semantic
// noise level satisfies the eavesdropper distortion constraint. Exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A computation was refused because it would exceed a stated work budget
// (e.g. exhaustive policy enumeration over too many policies). Exit code 4.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clssr
