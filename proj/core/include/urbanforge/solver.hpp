#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbanforge/metrics.hpp"
#include "urbanforge/region.hpp"
#include "urbanforge/rng.hpp"

namespace urbanforge {

// A non-residential role competing for unassigned regions, bounded by how
// many regions it may claim in the greedy phase.
struct Player {
  LandUseType role = LandUseType::kUnassigned;
  int move_limit = 0;
};

// Tuning for the two-phase optimizer. Weights must be non-negative and sum
// to 1. plateau_patience of 0 disables the early stop; a positive value
// stops after that many consecutive generations whose best fitness improved
// by at most plateau_epsilon.
struct GAConfig {
  int population_size = 20;
  int generations = 50;
  int elite_count = 4;
  int swaps_per_mutation = 2;
  int tournament_size = 3;
  double service_weight = 0.5;
  double ecology_weight = 0.5;
  std::uint64_t rng_seed = 0;
  int plateau_patience = 0;
  double plateau_epsilon = 1e-9;
  EssentialServices services = EssentialServices::defaults();
};

Status validate_ga_config(const GAConfig& cfg);

struct Population {
  std::vector<CityLayout> layouts;
};

// Weighted blend of service accessibility and ecological coverage; the
// objective both optimizer phases maximize.
Expected<double> fitness(const CityLayout& layout, const GAConfig& cfg);

// Marginal fitness gain of assigning `region_id` to the player's role.
// The region must currently be unassigned or vacant land.
Expected<double> calculate_return(const CityLayout& layout, const std::string& region_id,
                                  const Player& player, const GAConfig& cfg);

struct GreedyStep {
  std::size_t player_index = 0;
  std::string region_id;
  double return_value = 0.0;
};

struct GreedyResult {
  CityLayout layout;
  std::vector<GreedyStep> steps;
};

// Round-robin greedy phase: while unassigned or vacant regions remain and
// any player has moves left, each player in turn claims the candidate with
// the highest return (ties to the lowest region id) and spends one move.
// The steps record every claim for replay.
Expected<GreedyResult> greedy_assign(const CityLayout& initial, std::span<const Player> players,
                                     const GAConfig& cfg);

// Population seeded with the greedy layout: member 0 verbatim, the rest
// independent mutations of it.
Expected<Population> initialize_population(const CityLayout& seed_layout, const GAConfig& cfg);

// Applies swaps_per_mutation uniform role swaps between mutable regions
// (anything not currently Residential). Fewer than two mutable regions
// leaves the layout unchanged. Preserves the role multiset.
CityLayout mutate(const CityLayout& layout, Rng& rng, const GAConfig& cfg);

struct GenerationStat {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct EvolveResult {
  CityLayout best;
  std::vector<GenerationStat> trace;
};

// Elitist GA: each generation carries the top elite_count layouts forward
// unchanged and fills the remainder with mutations of tournament-selected
// parents. Returns the best layout of the final population plus the
// per-generation fitness trace.
Expected<EvolveResult> evolve(const Population& initial, const GAConfig& cfg);

struct OptimizeResult {
  CityLayout layout;
  std::vector<GreedyStep> greedy_steps;
  std::vector<GenerationStat> trace;
};

// Full pipeline: greedy phase, population seeding, then evolution.
// Deterministic for a fixed rng_seed.
Expected<OptimizeResult> optimize(const CityLayout& initial, std::span<const Player> players,
                                  const GAConfig& cfg);

}  // namespace urbanforge
