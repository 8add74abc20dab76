#include "matchwire/profile_io.hpp"

#include <string>
#include <vector>

#include "matchwire/error.hpp"

namespace matchwire {

namespace {

template <typename Id>
nlohmann::json side_to_json(const std::vector<std::vector<Id>>& prefs, const std::vector<int>& quota) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < prefs.size(); ++i) {
    std::vector<std::size_t> ids;
    for (Id id : prefs[i]) ids.push_back(id.index);
    out.push_back({{"id", i}, {"prefs", ids}, {"quota", quota[i]}});
  }
  return out;
}

template <typename Id>
void side_from_json(const nlohmann::json& arr, const char* name, std::vector<std::vector<Id>>& prefs,
                    std::vector<int>& quota) {
  if (!arr.is_array()) throw MatchError(ErrorCode::ConfigError, std::string("'") + name + "' must be an array");
  prefs.assign(arr.size(), {});
  quota.assign(arr.size(), 0);
  std::vector<bool> seen(arr.size(), false);
  for (const auto& entry : arr) {
    try {
      const auto id = entry.at("id").get<std::size_t>();
      if (id >= arr.size() || seen[id]) {
        throw MatchError(ErrorCode::ConfigError,
                         std::string(name) + " ids must be a permutation of 0..n-1 (bad id " + std::to_string(id) + ")");
      }
      seen[id] = true;
      for (auto p : entry.at("prefs").get<std::vector<std::size_t>>()) prefs[id].push_back(Id{p});
      quota[id] = entry.value("quota", 1);
    } catch (const nlohmann::json::exception& e) {
      throw MatchError(ErrorCode::ConfigError, std::string(name) + ": " + e.what());
    }
  }
}

}  // namespace

nlohmann::json profile_to_json(const PreferenceProfile& profile) {
  return {{"users", side_to_json(profile.user_prefs, profile.user_quota)},
          {"resources", side_to_json(profile.resource_prefs, profile.resource_quota)}};
}

PreferenceProfile profile_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("users") || !doc.contains("resources")) {
    throw MatchError(ErrorCode::ConfigError, "profile document needs 'users' and 'resources'");
  }
  PreferenceProfile p;
  side_from_json(doc.at("users"), "users", p.user_prefs, p.user_quota);
  side_from_json(doc.at("resources"), "resources", p.resource_prefs, p.resource_quota);
  return p;
}

nlohmann::json matching_to_json(const Matching& matching) {
  auto pairs = nlohmann::json::array();
  for (const auto& [u, r] : matching.pairs()) pairs.push_back({u.index, r.index});
  return {{"pairs", pairs}};
}

}  // namespace matchwire
