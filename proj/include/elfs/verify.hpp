#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace elfs {

struct IdentityCheck {
  std::string name;
  double value = 0.0;      // deviation, or the checked quantity for bounds
  double tolerance = 0.0;
  bool pass = false;
};

/// Exact identities on the built-in fixtures and span programs.
std::vector<IdentityCheck> identity_suite();

nlohmann::json to_json(const std::vector<IdentityCheck>& checks);

}  // namespace elfs
