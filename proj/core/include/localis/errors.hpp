#pragma once

#include <stdexcept>
#include <string>

namespace localis {

/// Thrown when a requested object would exceed a configured size cap
/// (grid point budget, dense matrix budget, ...).  Distinct from
/// std::invalid_argument so callers can treat "too big" separately from
/// "malformed".
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace localis
