#pragma once

#include <stdexcept>
#include <string>

namespace elsm {

/// Thrown when inputs are structurally inconsistent (unknown ids, missing
/// entries, bad dimensions). Distinct from std::domain_error, which is used
/// for values outside a formula's domain.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace elsm
