#pragma once

#include <span>
#include <string>
#include <vector>

#include "urbanforge/actions.hpp"
#include "urbanforge/completion.hpp"
#include "urbanforge/metrics.hpp"

namespace urbanforge {

// What a regional planner sees of one region: identity, current role, and
// location. Planners never see geometry beyond the centroid.
struct ContextRegion {
  std::string id;
  LandUseType role = LandUseType::kUnassigned;
  Point centroid;
};

// Everything a regional planner is shown: its sub-region's regions (ascending
// id), the demographic it advocates for, city-level service/ecology, the
// sub-region's own satisfaction, and the rules its proposal must respect.
struct PlannerContext {
  std::string subregion_id;
  DemographicRole role;
  std::vector<ContextRegion> regions;
  MetricsReport metrics;  // service/ecology are city-wide; satisfaction is sub-region-local
  int action_budget = 5;
  std::vector<LandUseType> protected_roles;
  ScaleConfig scale;
};

// One regional planner's requested edits, at most action_budget of them, all
// targeting regions inside its sub-region.
struct Proposal {
  std::string subregion_id;
  DemographicKind kind = DemographicKind::kResidential;
  std::vector<LayoutAction> actions;
  std::string rationale;
};

// Master-planner acceptance rules: the per-action change policy plus the
// metric guard. An action is applied only when satisfaction rises by more
// than min_satisfaction_gain while service and ecology drop no further than
// their allowances (defaults: strict satisfaction gain, no drops).
struct IntegrationPolicy {
  ChangePolicy change;
  double min_satisfaction_gain = 0.0;
  double max_service_drop = 0.0;
  double max_ecology_drop = 0.0;
};

Status validate_integration_policy(const IntegrationPolicy& policy);

// Context for one sub-region: its mask-filtered regions plus current metrics.
// An empty sub-region is not an error; *warning (when given) is set to
// kEmptySubRegion and a zero-region context is returned.
Expected<PlannerContext> build_regional_context(const CityLayout& layout,
                                                const SubRegion& subregion,
                                                const EssentialServices& services,
                                                const IntegrationPolicy& policy,
                                                Status* warning = nullptr);

// Deterministic offline planner. Walks the role's needs in priority order;
// for the first sub-region resident lacking a need within the satisfaction
// radius, reassigns the nearest vacant or unassigned region (ties to the
// lowest id) to that need. Skips protected need types, tracks its own edits,
// and stops at the budget or when vacancies run out.
Proposal heuristic_planner(const PlannerContext& ctx);

// Decodes a planner reply against the wire schema and the context: only
// in-context region ids, only known kinds and types, at most budget actions.
Expected<Proposal> parse_proposal(const std::string& raw, const PlannerContext& ctx);

// The message list propose() sends: the schema and rules, then the context.
std::vector<ChatMessage> planner_messages(const PlannerContext& ctx);

// Asks the completion client for a proposal, re-asking on malformed replies
// up to max_retries times with the rejection reason attached. Transport
// failure surfaces as kServiceUnavailable; persistent malformed output as
// kPlannerFailed.
Expected<Proposal> propose(CompletionClient& client, const PlannerContext& ctx);

// One master-planner ruling. Metric deltas are meaningful only when
// evaluated is true (the action passed validation and was scored).
struct Decision {
  std::string subregion_id;
  LayoutAction action;
  bool accepted = false;
  std::string reason;
  bool evaluated = false;
  double service_delta = 0.0;
  double ecology_delta = 0.0;
  double satisfaction_delta = 0.0;
};

struct IntegrationResult {
  CityLayout layout;
  std::vector<Decision> log;
};

// Master-planner round: proposals ordered Industrial, Educational,
// Commercial, Residential, actions in listed order, each validated against
// the change policy and the metric guard on the current layout. Accepted
// actions apply immediately; every ruling is logged.
Expected<IntegrationResult> integrate(const CityLayout& layout,
                                      std::span<const Proposal> proposals,
                                      const IntegrationPolicy& policy,
                                      const EssentialServices& services,
                                      std::span<const SubRegion> subregions);

// JSON-lines form of the decision log, one record per ruling.
std::string decision_log_to_jsonl(std::span<const Decision> log);

}  // namespace urbanforge
