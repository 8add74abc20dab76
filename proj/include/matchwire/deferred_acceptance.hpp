#pragma once

#include <cstddef>

#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"

namespace matchwire {

enum class Proposer { Users, Resources };

struct DaResult {
  Matching matching;
  std::size_t proposals = 0;
  std::size_t rounds = 0;
};

/// Round-based deferred acceptance.
///
/// Each round, every proposer with spare quota proposes to its next
/// not-yet-tried partners (as many as it has free slots). Every receiver then
/// pools the proposals it is holding with the new ones and keeps its
/// top-quota set, rejecting the rest. The run ends in the first round in
/// which nobody proposes. Output is a function of the profile alone.
///
/// Supports one-to-one, many-to-one and one-to-many quota shapes; throws
/// QuotaShapeUnsupported for many-to-many profiles.
DaResult run_deferred_acceptance(const ValidatedProfile& profile, Proposer proposer);

inline Matching deferred_acceptance(const ValidatedProfile& profile, Proposer proposer) {
  return run_deferred_acceptance(profile, proposer).matching;
}

/// Total proposals issued by `run_deferred_acceptance`. Never exceeds the
/// number of mutually acceptable pairs.
inline std::size_t proposal_count(const ValidatedProfile& profile, Proposer proposer) {
  return run_deferred_acceptance(profile, proposer).proposals;
}

}  // namespace matchwire
