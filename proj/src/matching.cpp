#include "matchwire/matching.hpp"

#include <algorithm>
#include <string>

#include "matchwire/error.hpp"

namespace matchwire {

namespace {

void check_bounds(const Matching& m, UserId u, ResourceId r) {
  if (u.index >= m.n_users() || r.index >= m.n_resources()) {
    throw MatchError(ErrorCode::UnknownAgent,
                     "pair (" + std::to_string(u.index) + ", " + std::to_string(r.index) + ") out of range");
  }
}

template <typename Id>
bool sorted_insert(std::vector<Id>& v, Id id) {
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it != v.end() && *it == id) return false;
  v.insert(it, id);
  return true;
}

template <typename Id>
bool sorted_erase(std::vector<Id>& v, Id id) {
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it == v.end() || !(*it == id)) return false;
  v.erase(it);
  return true;
}

}  // namespace

bool Matching::contains(UserId u, ResourceId r) const {
  check_bounds(*this, u, r);
  const auto& list = by_user_[u.index];
  return std::binary_search(list.begin(), list.end(), r);
}

bool Matching::add(UserId u, ResourceId r) {
  check_bounds(*this, u, r);
  if (!sorted_insert(by_user_[u.index], r)) return false;
  sorted_insert(by_resource_[r.index], u);
  return true;
}

bool Matching::remove(UserId u, ResourceId r) {
  check_bounds(*this, u, r);
  if (!sorted_erase(by_user_[u.index], r)) return false;
  sorted_erase(by_resource_[r.index], u);
  return true;
}

void Matching::unmatch_user(UserId u) {
  const auto held = by_user_.at(u.index);
  for (ResourceId r : held) remove(u, r);
}

std::vector<std::pair<UserId, ResourceId>> Matching::pairs() const {
  std::vector<std::pair<UserId, ResourceId>> out;
  for (std::size_t u = 0; u < by_user_.size(); ++u) {
    for (ResourceId r : by_user_[u]) out.emplace_back(UserId{u}, r);
  }
  return out;
}

std::size_t Matching::size() const {
  std::size_t n = 0;
  for (const auto& list : by_user_) n += list.size();
  return n;
}

}  // namespace matchwire
