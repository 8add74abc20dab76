#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"

namespace matchwire {

// Document layout:
//   {"users":     [{"id": 0, "prefs": [1, 0], "quota": 1}, ...],
//    "resources": [{"id": 0, "prefs": [0],    "quota": 2}, ...]}
// Ids on each side must be exactly 0..n-1, in any order.

nlohmann::json profile_to_json(const PreferenceProfile& profile);
PreferenceProfile profile_from_json(const nlohmann::json& doc);

/// {"pairs": [[user, resource], ...]}
nlohmann::json matching_to_json(const Matching& matching);

}  // namespace matchwire
