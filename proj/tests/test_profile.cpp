#include <doctest.h>

#include "matchwire/error.hpp"
#include "matchwire/profile.hpp"
#include "matchwire/profile_io.hpp"
#include "oracles.hpp"

using namespace matchwire;
using matchwire::testing::build;

namespace {

ErrorCode code_of(const PreferenceProfile& p) {
  try {
    validate_profile(p);
  } catch (const MatchError& e) {
    return e.code();
  }
  FAIL("expected validation to throw");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("one-sided entries are pruned") {
  // u0:[r0,r1], r0:[u0], r1:[]
  const auto v = validate_profile(build({{0, 1}}, {{0}, {}}));
  REQUIRE(v.user_prefs(UserId{0}).size() == 1);
  CHECK(v.user_prefs(UserId{0})[0] == ResourceId{0});
  CHECK(v.resource_prefs(ResourceId{0}).size() == 1);
  CHECK(v.resource_prefs(ResourceId{1}).empty());
  CHECK_FALSE(v.acceptable(UserId{0}, ResourceId{1}));
  CHECK(v.acceptable_pairs() == 1);
}

TEST_CASE("pruning keeps relative order") {
  // u0 lists r2, r0, r1 but r0 does not list u0.
  const auto v = validate_profile(build({{2, 0, 1}}, {{}, {0}, {0}}));
  REQUIRE(v.user_prefs(UserId{0}).size() == 2);
  CHECK(v.user_prefs(UserId{0})[0] == ResourceId{2});
  CHECK(v.user_prefs(UserId{0})[1] == ResourceId{1});
  CHECK(v.user_rank(UserId{0}, ResourceId{1}) == 1);
}

TEST_CASE("duplicates and bad quotas are rejected") {
  CHECK(code_of(build({{0, 0}}, {{0}})) == ErrorCode::DuplicateEntry);
  CHECK(code_of(build({{0}}, {{0, 0}})) == ErrorCode::DuplicateEntry);
  CHECK(code_of(build({{0}}, {{0}}, {0}, {1})) == ErrorCode::ZeroQuota);
  CHECK(code_of(build({{0}}, {{0}}, {1}, {-2})) == ErrorCode::ZeroQuota);
  CHECK(code_of(build({{3}}, {{0}})) == ErrorCode::UnknownAgent);
}

TEST_CASE("all-empty lists give a valid profile with no acceptable pairs") {
  const auto v = validate_profile(build({{}, {}}, {{}, {}, {}}));
  CHECK(v.n_users() == 2);
  CHECK(v.n_resources() == 3);
  CHECK(v.acceptable_pairs() == 0);
}

TEST_CASE("quota shapes") {
  CHECK(validate_profile(build({{0}}, {{0}})).shape() == QuotaShape::OneToOne);
  CHECK(validate_profile(build({{0}}, {{0}}, {1}, {3})).shape() == QuotaShape::ManyToOne);
  CHECK(validate_profile(build({{0}}, {{0}}, {2}, {1})).shape() == QuotaShape::OneToMany);
  CHECK(validate_profile(build({{0}}, {{0}}, {2}, {2})).shape() == QuotaShape::ManyToMany);
}

TEST_CASE("json document round trip") {
  const auto p = build({{1, 0}, {0}}, {{0, 1}, {0}}, {1, 1}, {2, 1});
  const auto doc = profile_to_json(p);
  CHECK(doc.at("users").size() == 2);
  CHECK(doc.at("resources")[0].at("quota") == 2);
  const auto back = profile_from_json(doc);
  CHECK(back.user_prefs == p.user_prefs);
  CHECK(back.resource_prefs == p.resource_prefs);
  CHECK(back.resource_quota == p.resource_quota);
}

TEST_CASE("json ids may come in any order but must be dense") {
  const auto doc = nlohmann::json::parse(R"({
    "users": [{"id": 1, "prefs": [0], "quota": 1}, {"id": 0, "prefs": [], "quota": 1}],
    "resources": [{"id": 0, "prefs": [1, 0], "quota": 1}]})");
  const auto p = profile_from_json(doc);
  CHECK(p.user_prefs[1].size() == 1);
  CHECK(p.user_prefs[0].empty());

  const auto bad = nlohmann::json::parse(R"({"users": [{"id": 4, "prefs": []}], "resources": []})");
  CHECK_THROWS_AS(profile_from_json(bad), MatchError);
  CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse("{}")), MatchError);
}
