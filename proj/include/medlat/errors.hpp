#pragma once

#include <stdexcept>
#include <string>

namespace medlat {

/// A computation would exceed its fixed work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace medlat
