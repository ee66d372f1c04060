#include "urbanforge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

#include <json.hpp>

namespace urbanforge {
namespace {

double distance_m(const Point& a, const Point& b, const ScaleConfig& scale) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return scale.meters_per_pixel * std::sqrt(dx * dx + dy * dy);
}

bool contains_role(std::span<const LandUseType> roles, LandUseType role) {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

bool is_claimable(LandUseType role) {
  return role == LandUseType::kVacantLand || role == LandUseType::kUnassigned;
}

std::string format_fixed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

nlohmann::ordered_json action_to_json(const LayoutAction& action) {
  nlohmann::ordered_json out;
  if (action.kind == LayoutAction::Kind::kReassign) {
    out["kind"] = "reassign";
    out["target"] = action.target;
    out["new_type"] = std::string(land_use_name(action.new_type));
  } else {
    out["kind"] = "swap";
    out["target"] = action.target;
    out["other"] = action.other;
  }
  return out;
}

struct MetricSnapshot {
  double service = 0.0;
  double ecology = 0.0;
  double satisfaction = 0.0;
};

Expected<MetricSnapshot> snapshot(const CityLayout& layout, const EssentialServices& services,
                                  std::span<const SubRegion> subregions) {
  MetricSnapshot snap;
  auto service = service_accessibility(layout, services);
  if (!service.ok()) return service.error();
  snap.service = service.value();
  auto ecology = ecological_coverage(layout);
  if (!ecology.ok()) return ecology.error();
  snap.ecology = ecology.value();
  auto sat = satisfaction(layout, subregions);
  if (!sat.ok()) return sat.error();
  snap.satisfaction = sat.value();
  return snap;
}

}  // namespace

Status validate_integration_policy(const IntegrationPolicy& policy) {
  if (policy.change.action_budget < 0) {
    return Status(Errc::kInvalidConfig, "action budget must be >= 0");
  }
  if (policy.min_satisfaction_gain < 0.0) {
    return Status(Errc::kInvalidConfig, "minimum satisfaction gain must be >= 0");
  }
  if (policy.max_service_drop < 0.0 || policy.max_ecology_drop < 0.0) {
    return Status(Errc::kInvalidConfig, "allowed metric drops must be >= 0");
  }
  return Status();
}

Expected<PlannerContext> build_regional_context(const CityLayout& layout,
                                                const SubRegion& subregion,
                                                const EssentialServices& services,
                                                const IntegrationPolicy& policy,
                                                Status* warning) {
  if (auto st = validate_integration_policy(policy); !st.ok()) return st.error();
  if (auto st = validate_role(subregion.role); !st.ok()) return st.error();

  PlannerContext ctx;
  ctx.subregion_id = subregion.id;
  ctx.role = subregion.role;
  ctx.action_budget = policy.change.action_budget;
  ctx.protected_roles = policy.change.protected_roles;
  ctx.scale = layout.scale();

  for (std::size_t i : layout.ascending_id_order()) {
    const Region& region = layout.region_at(i);
    const int px = static_cast<int>(std::floor(region.centroid.x));
    const int py = static_cast<int>(std::floor(region.centroid.y));
    if (!subregion.mask.in_bounds(px, py) || !subregion.mask.test(px, py)) continue;
    ctx.regions.push_back({region.id, layout.role_at(i), region.centroid});
  }

  ctx.metrics.stage = subregion.id;
  auto service = service_accessibility(layout, services);
  if (!service.ok()) return service.error();
  ctx.metrics.service = service.value();
  auto ecology = ecological_coverage(layout);
  if (!ecology.ok()) return ecology.error();
  ctx.metrics.ecology = ecology.value();

  // Sub-region satisfaction: this sub-region's residents against city-wide
  // facilities. No residents inside the mask reads as 0.
  const SubRegion only[] = {subregion};
  auto sat = satisfaction(layout, only);
  if (sat.ok()) {
    ctx.metrics.satisfaction = sat.value();
  } else if (sat.error().code == Errc::kNoResidents) {
    ctx.metrics.satisfaction = 0.0;
  } else {
    return sat.error();
  }

  if (warning != nullptr) {
    *warning = ctx.regions.empty()
                   ? Status(Errc::kEmptySubRegion,
                            "sub-region " + subregion.id + " contains no regions")
                   : Status();
  }
  return ctx;
}

Proposal heuristic_planner(const PlannerContext& ctx) {
  Proposal out;
  out.subregion_id = ctx.subregion_id;
  out.kind = ctx.role.kind;

  std::vector<ContextRegion> regions = ctx.regions;
  std::vector<std::string_view> covered;
  for (LandUseType need : ctx.role.needs) {
    if (static_cast<int>(out.actions.size()) >= ctx.action_budget) break;
    // Introducing a protected role is off the table; the master planner
    // would reject it.
    if (contains_role(ctx.protected_roles, need)) continue;

    const ContextRegion* lacking = nullptr;
    for (const ContextRegion& resident : regions) {
      if (resident.role != LandUseType::kResidential) continue;
      bool reachable = false;
      for (const ContextRegion& facility : regions) {
        if (facility.role != need) continue;
        if (distance_m(resident.centroid, facility.centroid, ctx.scale) <
            ctx.scale.satisfaction_radius_m) {
          reachable = true;
          break;
        }
      }
      if (!reachable) {
        lacking = &resident;
        break;
      }
    }
    if (lacking == nullptr) continue;

    ContextRegion* chosen = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (ContextRegion& candidate : regions) {
      if (!is_claimable(candidate.role)) continue;
      const double d = distance_m(lacking->centroid, candidate.centroid, ctx.scale);
      if (d < best) {
        best = d;
        chosen = &candidate;
      }
    }
    if (chosen == nullptr) break;

    out.actions.push_back(LayoutAction::reassign(chosen->id, need));
    chosen->role = need;  // later needs see this edit
    covered.push_back(land_use_name(need));
  }

  if (covered.empty()) {
    out.rationale = "no unmet needs reachable by reassigning vacant land";
  } else {
    out.rationale = "reassign vacant land to cover unmet needs:";
    for (std::string_view name : covered) {
      out.rationale += ' ';
      out.rationale += name;
    }
  }
  return out;
}

Expected<Proposal> parse_proposal(const std::string& raw, const PlannerContext& ctx) {
  auto doc = nlohmann::json::parse(raw, nullptr, false);
  if (doc.is_discarded()) {
    // Planner replies often wrap the JSON in prose; retry on the outermost
    // brace slice before giving up.
    const auto first = raw.find('{');
    const auto last = raw.rfind('}');
    if (first == std::string::npos || last == std::string::npos || last <= first) {
      return make_error(Errc::kParseError, "proposal is not valid JSON");
    }
    doc = nlohmann::json::parse(raw.substr(first, last - first + 1), nullptr, false);
    if (doc.is_discarded()) {
      return make_error(Errc::kParseError, "proposal is not valid JSON");
    }
  }
  if (!doc.is_object() || !doc.contains("actions") || !doc["actions"].is_array()) {
    return make_error(Errc::kParseError, "proposal must be an object with an 'actions' array");
  }

  std::unordered_set<std::string_view> known;
  for (const ContextRegion& region : ctx.regions) known.insert(region.id);

  Proposal out;
  out.subregion_id = ctx.subregion_id;
  out.kind = ctx.role.kind;
  if (doc.contains("rationale")) {
    if (!doc["rationale"].is_string()) {
      return make_error(Errc::kParseError, "rationale must be a string");
    }
    out.rationale = doc["rationale"].get<std::string>();
  }

  for (const auto& item : doc["actions"]) {
    if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string() ||
        !item.contains("target") || !item["target"].is_string()) {
      return make_error(Errc::kParseError, "each action needs string 'kind' and 'target'");
    }
    const auto kind = item["kind"].get<std::string>();
    const auto target = item["target"].get<std::string>();
    if (known.find(target) == known.end()) {
      return make_error(Errc::kUnknownRegion,
                        "action targets region '" + target + "' outside the sub-region");
    }
    if (kind == "reassign") {
      if (!item.contains("new_type") || !item["new_type"].is_string()) {
        return make_error(Errc::kParseError, "reassign needs a 'new_type' string");
      }
      const auto type_name = item["new_type"].get<std::string>();
      const auto new_type = parse_land_use(type_name);
      if (!new_type.has_value() || *new_type == LandUseType::kUnassigned) {
        return make_error(Errc::kParseError, "unknown land-use type '" + type_name + "'");
      }
      out.actions.push_back(LayoutAction::reassign(target, *new_type));
    } else if (kind == "swap") {
      if (!item.contains("other") || !item["other"].is_string()) {
        return make_error(Errc::kParseError, "swap needs an 'other' string");
      }
      const auto other = item["other"].get<std::string>();
      if (known.find(other) == known.end()) {
        return make_error(Errc::kUnknownRegion,
                          "action targets region '" + other + "' outside the sub-region");
      }
      out.actions.push_back(LayoutAction::swap(target, other));
    } else {
      return make_error(Errc::kParseError, "unknown action kind '" + kind + "'");
    }
  }

  if (static_cast<int>(out.actions.size()) > ctx.action_budget) {
    return make_error(Errc::kBudgetExceeded,
                      "proposal lists " + std::to_string(out.actions.size()) +
                          " actions; budget is " + std::to_string(ctx.action_budget));
  }
  return out;
}

std::vector<ChatMessage> planner_messages(const PlannerContext& ctx) {
  std::string protect;
  for (LandUseType role : ctx.protected_roles) {
    if (!protect.empty()) protect += ", ";
    protect += land_use_name(role);
  }

  std::string system = "You are the ";
  system += demographic_name(ctx.role.kind);
  system +=
      " regional planner in a land-use negotiation. Propose edits that help "
      "residents of your sub-region reach the facilities they need. Reply "
      "with one JSON object and nothing else, in this schema: "
      "{\"actions\": [{\"kind\": \"reassign\", \"target\": \"<region-id>\", "
      "\"new_type\": \"<LandUseType>\"} | {\"kind\": \"swap\", \"target\": "
      "\"<region-id>\", \"other\": \"<region-id>\"}], \"rationale\": "
      "\"<string>\"}. Rules: at most " +
      std::to_string(ctx.action_budget) +
      " actions; only region ids listed in the context; never target a region "
      "holding a protected role (" +
      protect +
      ") and never reassign to one; reassign targets must currently be "
      "VacantLand or Unassigned.";

  std::string user = "Sub-region: " + ctx.subregion_id + "\n";
  user += "Demographic: ";
  user += demographic_name(ctx.role.kind);
  user += "\nNeeds (priority order):";
  for (LandUseType need : ctx.role.needs) {
    user += ' ';
    user += land_use_name(need);
  }
  user += "\nWalking limit: " + format_fixed(ctx.scale.satisfaction_radius_m) + " m\n";
  user += "City service: " + format_fixed(ctx.metrics.service) +
          ", city ecology: " + format_fixed(ctx.metrics.ecology) +
          ", sub-region satisfaction: " + format_fixed(ctx.metrics.satisfaction) + "\n";
  user += "Regions (id, role, centroid x, centroid y):\n";
  for (const ContextRegion& region : ctx.regions) {
    user += "  " + region.id + " ";
    user += land_use_name(region.role);
    user += " " + format_fixed(region.centroid.x) + " " + format_fixed(region.centroid.y) + "\n";
  }
  return {{"system", std::move(system)}, {"user", std::move(user)}};
}

Expected<Proposal> propose(CompletionClient& client, const PlannerContext& ctx) {
  std::vector<ChatMessage> messages = planner_messages(ctx);
  const int attempts = client.max_retries() + 1;
  Error last = make_error(Errc::kPlannerFailed, "no attempts made");
  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto reply = client.complete(messages);
    if (!reply.ok()) {
      last = reply.error();
      continue;
    }
    auto proposal = parse_proposal(reply.value(), ctx);
    if (proposal.ok()) return proposal;
    last = proposal.error();
    messages.push_back({"assistant", reply.value()});
    messages.push_back({"user", "That reply was rejected: " + last.message +
                                    ". Respond again with only the JSON object in the "
                                    "required schema."});
  }
  if (last.code == Errc::kServiceUnavailable) return last;
  return make_error(Errc::kPlannerFailed,
                    "planner for sub-region " + ctx.subregion_id + " failed: " + last.message);
}

Expected<IntegrationResult> integrate(const CityLayout& layout,
                                      std::span<const Proposal> proposals,
                                      const IntegrationPolicy& policy,
                                      const EssentialServices& services,
                                      std::span<const SubRegion> subregions) {
  if (auto st = validate_integration_policy(policy); !st.ok()) return st.error();

  std::vector<const Proposal*> ordered;
  ordered.reserve(proposals.size());
  for (const Proposal& p : proposals) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Proposal* a, const Proposal* b) {
    return static_cast<int>(a->kind) < static_cast<int>(b->kind);
  });

  IntegrationResult result;
  result.layout = layout;
  auto current = snapshot(result.layout, services, subregions);
  if (!current.ok()) return current.error();

  for (const Proposal* proposal : ordered) {
    int accepted = 0;
    for (const LayoutAction& action : proposal->actions) {
      Decision decision;
      decision.subregion_id = proposal->subregion_id;
      decision.action = action;

      if (auto st = validate_action(result.layout, action, policy.change, accepted); !st.ok()) {
        decision.reason = std::string(errc_name(st.error().code)) + ": " + st.error().message;
        result.log.push_back(std::move(decision));
        continue;
      }

      CityLayout candidate = result.layout;
      if (auto st = apply_action(candidate, action); !st.ok()) {
        decision.reason = std::string(errc_name(st.error().code)) + ": " + st.error().message;
        result.log.push_back(std::move(decision));
        continue;
      }
      auto next = snapshot(candidate, services, subregions);
      if (!next.ok()) {
        decision.reason =
            std::string(errc_name(next.error().code)) + ": " + next.error().message;
        result.log.push_back(std::move(decision));
        continue;
      }

      decision.evaluated = true;
      decision.service_delta = next.value().service - current.value().service;
      decision.ecology_delta = next.value().ecology - current.value().ecology;
      decision.satisfaction_delta =
          next.value().satisfaction - current.value().satisfaction;

      if (!(decision.satisfaction_delta > policy.min_satisfaction_gain)) {
        decision.reason = "guard: satisfaction delta " +
                          format_fixed(decision.satisfaction_delta) +
                          " does not exceed required gain " +
                          format_fixed(policy.min_satisfaction_gain);
      } else if (next.value().service < current.value().service - policy.max_service_drop) {
        decision.reason = "guard: service would drop by " +
                          format_fixed(current.value().service - next.value().service);
      } else if (next.value().ecology < current.value().ecology - policy.max_ecology_drop) {
        decision.reason = "guard: ecology would drop by " +
                          format_fixed(current.value().ecology - next.value().ecology);
      } else {
        decision.accepted = true;
        decision.reason = "applied";
        result.layout = std::move(candidate);
        current = next;
        ++accepted;
      }
      result.log.push_back(std::move(decision));
    }
  }
  return result;
}

std::string decision_log_to_jsonl(std::span<const Decision> log) {
  std::string out;
  for (const Decision& decision : log) {
    nlohmann::ordered_json rec;
    rec["subregion"] = decision.subregion_id;
    rec["action"] = action_to_json(decision.action);
    rec["decision"] = decision.accepted ? "accept" : "reject";
    rec["reason"] = decision.reason;
    if (decision.evaluated) {
      rec["service_delta"] = decision.service_delta;
      rec["ecology_delta"] = decision.ecology_delta;
      rec["satisfaction_delta"] = decision.satisfaction_delta;
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace urbanforge
