#pragma once

#include <string>
#include <vector>

#include "urbanforge/region.hpp"

namespace urbanforge {

// One requested layout edit. Reassign retargets a single region to a new
// role; Swap exchanges the roles of two distinct regions.
struct LayoutAction {
  enum class Kind { kReassign, kSwap };

  Kind kind = Kind::kReassign;
  std::string target;
  LandUseType new_type = LandUseType::kUnassigned;  // Reassign only
  std::string other;                                // Swap only

  static LayoutAction reassign(std::string target, LandUseType new_type) {
    LayoutAction a;
    a.kind = Kind::kReassign;
    a.target = std::move(target);
    a.new_type = new_type;
    return a;
  }

  static LayoutAction swap(std::string target, std::string other) {
    LayoutAction a;
    a.kind = Kind::kSwap;
    a.target = std::move(target);
    a.other = std::move(other);
    return a;
  }
};

// Minimal-change rules the master planner enforces on every action.
//
// Protected roles are fenced on both sides: an action may neither retarget a
// region currently holding a protected role nor introduce a protected role
// via Reassign. With the default set {Residential, ParkAndOpenSpace} this
// keeps the resident population and the park inventory fixed through an
// integration round, so ecological coverage passes through unchanged.
struct ChangePolicy {
  int action_budget = 5;
  std::vector<LandUseType> protected_roles = {LandUseType::kResidential,
                                              LandUseType::kParkAndOpenSpace};
  bool allow_reassign_non_vacant = false;

  bool is_protected(LandUseType role) const {
    for (LandUseType p : protected_roles) {
      if (p == role) return true;
    }
    return false;
  }
};

// Checks one action against the layout and policy without mutating anything.
// accepted_so_far counts actions already accepted from the same proposal, for
// the per-proposal budget check.
Status validate_action(const CityLayout& layout, const LayoutAction& action,
                       const ChangePolicy& policy, int accepted_so_far = 0);

// Applies a previously validated action. Only the role overlay changes.
Status apply_action(CityLayout& layout, const LayoutAction& action);

}  // namespace urbanforge
