#pragma once

#include <stdexcept>
#include <string>

namespace elicit {

/// Malformed or missing input data (ranking files, config files, policy
/// files). Distinct from std::invalid_argument so the CLI can map it to its
/// own exit code.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace elicit
