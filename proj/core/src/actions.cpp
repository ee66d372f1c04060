#include "urbanforge/actions.hpp"

namespace urbanforge {

Status validate_action(const CityLayout& layout, const LayoutAction& action,
                       const ChangePolicy& policy, int accepted_so_far) {
  if (accepted_so_far >= policy.action_budget) {
    return Status(Errc::kBudgetExceeded, "proposal exceeds the per-proposal action budget");
  }

  const std::size_t target = layout.index_of(action.target);
  if (target == CityLayout::npos) {
    return Status(Errc::kUnknownRegion, "unknown region id: " + action.target);
  }
  const LandUseType target_role = layout.role_at(target);
  if (policy.is_protected(target_role)) {
    return Status(Errc::kProtectedRole,
                  "region " + action.target + " holds protected role " +
                      std::string(land_use_name(target_role)));
  }

  switch (action.kind) {
    case LayoutAction::Kind::kReassign: {
      if (action.new_type == LandUseType::kUnassigned) {
        return Status(Errc::kInvalidAction, "reassign requires a concrete new type");
      }
      if (policy.is_protected(action.new_type)) {
        return Status(Errc::kProtectedRole,
                      "reassign may not introduce protected role " +
                          std::string(land_use_name(action.new_type)));
      }
      if (!policy.allow_reassign_non_vacant && target_role != LandUseType::kVacantLand &&
          target_role != LandUseType::kUnassigned) {
        return Status(Errc::kNonVacantReassign,
                      "policy forbids reassigning non-vacant region " + action.target);
      }
      return Status();
    }
    case LayoutAction::Kind::kSwap: {
      if (action.target == action.other) {
        return Status(Errc::kInvalidAction, "swap endpoints must be distinct");
      }
      const std::size_t other = layout.index_of(action.other);
      if (other == CityLayout::npos) {
        return Status(Errc::kUnknownRegion, "unknown region id: " + action.other);
      }
      const LandUseType other_role = layout.role_at(other);
      if (policy.is_protected(other_role)) {
        return Status(Errc::kProtectedRole,
                      "region " + action.other + " holds protected role " +
                          std::string(land_use_name(other_role)));
      }
      return Status();
    }
  }
  return Status(Errc::kInvalidAction, "unknown action kind");
}

Status apply_action(CityLayout& layout, const LayoutAction& action) {
  const std::size_t target = layout.index_of(action.target);
  if (target == CityLayout::npos) {
    return Status(Errc::kUnknownRegion, "unknown region id: " + action.target);
  }
  switch (action.kind) {
    case LayoutAction::Kind::kReassign:
      layout.set_role(target, action.new_type);
      return Status();
    case LayoutAction::Kind::kSwap: {
      if (action.target == action.other) {
        return Status(Errc::kInvalidAction, "swap endpoints must be distinct");
      }
      const std::size_t other = layout.index_of(action.other);
      if (other == CityLayout::npos) {
        return Status(Errc::kUnknownRegion, "unknown region id: " + action.other);
      }
      const LandUseType tmp = layout.role_at(target);
      layout.set_role(target, layout.role_at(other));
      layout.set_role(other, tmp);
      return Status();
    }
  }
  return Status(Errc::kInvalidAction, "unknown action kind");
}

}  // namespace urbanforge
