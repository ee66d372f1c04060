#include "urbanforge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace urbanforge {

namespace {

bool is_claimable(LandUseType role) {
  return role == LandUseType::kUnassigned || role == LandUseType::kVacantLand;
}

// Mutation may move any non-residential role; residents stay put.
std::vector<std::size_t> mutable_indices(const CityLayout& layout) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout.role_at(i) != LandUseType::kResidential) out.push_back(i);
  }
  return out;
}

// Best of tournament_size uniform draws, ties to the lowest member index.
std::size_t tournament_pick(std::span<const double> fits, int tournament_size, Rng& rng) {
  std::size_t best = rng.below(fits.size());
  for (int t = 1; t < tournament_size; ++t) {
    const std::size_t candidate = rng.below(fits.size());
    if (fits[candidate] > fits[best] || (fits[candidate] == fits[best] && candidate < best)) {
      best = candidate;
    }
  }
  return best;
}

}  // namespace

Status validate_ga_config(const GAConfig& cfg) {
  if (cfg.population_size < 1) return Status(Errc::kInvalidConfig, "population_size must be >= 1");
  if (cfg.elite_count < 1 || cfg.elite_count > cfg.population_size) {
    return Status(Errc::kInvalidConfig, "elite_count must be in [1, population_size]");
  }
  if (cfg.generations < 0) return Status(Errc::kInvalidConfig, "generations must be >= 0");
  if (cfg.swaps_per_mutation < 1) {
    return Status(Errc::kInvalidConfig, "swaps_per_mutation must be >= 1");
  }
  if (cfg.tournament_size < 2) return Status(Errc::kInvalidConfig, "tournament_size must be >= 2");
  if (cfg.service_weight < 0.0 || cfg.ecology_weight < 0.0 ||
      std::fabs(cfg.service_weight + cfg.ecology_weight - 1.0) > 1e-9) {
    return Status(Errc::kInvalidConfig, "fitness weights must be >= 0 and sum to 1");
  }
  if (cfg.plateau_patience < 0) return Status(Errc::kInvalidConfig, "plateau_patience must be >= 0");
  return validate_services(cfg.services);
}

Expected<double> fitness(const CityLayout& layout, const GAConfig& cfg) {
  Expected<double> service = service_accessibility(layout, cfg.services);
  if (!service.ok()) return service.error();
  Expected<double> ecology = ecological_coverage(layout);
  if (!ecology.ok()) return ecology.error();
  return cfg.service_weight * service.value() + cfg.ecology_weight * ecology.value();
}

Expected<double> calculate_return(const CityLayout& layout, const std::string& region_id,
                                  const Player& player, const GAConfig& cfg) {
  const std::size_t index = layout.index_of(region_id);
  if (index == CityLayout::npos) {
    return make_error(Errc::kUnknownRegion, "unknown region id: " + region_id);
  }
  if (!is_claimable(layout.role_at(index))) {
    return make_error(Errc::kRegionOccupied,
                      "region " + region_id + " already holds a player role");
  }
  Expected<double> before = fitness(layout, cfg);
  if (!before.ok()) return before.error();

  CityLayout changed = layout;
  changed.set_role(index, player.role);
  Expected<double> after = fitness(changed, cfg);
  if (!after.ok()) return after.error();
  return after.value() - before.value();
}

Expected<GreedyResult> greedy_assign(const CityLayout& initial, std::span<const Player> players,
                                     const GAConfig& cfg) {
  GreedyResult result;
  result.layout = initial;
  std::vector<int> limits;
  limits.reserve(players.size());
  for (const Player& p : players) limits.push_back(std::max(0, p.move_limit));

  auto claimable = [&]() {
    std::vector<std::size_t> out;
    for (std::size_t index : result.layout.ascending_id_order()) {
      if (is_claimable(result.layout.role_at(index))) out.push_back(index);
    }
    return out;
  };

  bool any_moves = std::accumulate(limits.begin(), limits.end(), 0) > 0;
  while (any_moves && !claimable().empty()) {
    for (std::size_t p = 0; p < players.size(); ++p) {
      if (limits[p] == 0) continue;
      const std::vector<std::size_t> candidates = claimable();
      if (candidates.empty()) break;

      Expected<double> base = fitness(result.layout, cfg);
      if (!base.ok()) return base.error();

      // Argmax over candidates; ascending-id scan plus strict comparison
      // keeps the lowest id on ties.
      std::size_t best_index = candidates.front();
      double best_return = -std::numeric_limits<double>::infinity();
      CityLayout scratch = result.layout;
      for (std::size_t candidate : candidates) {
        scratch.set_role(candidate, players[p].role);
        Expected<double> after = fitness(scratch, cfg);
        if (!after.ok()) return after.error();
        scratch.set_role(candidate, result.layout.role_at(candidate));
        const double gain = after.value() - base.value();
        if (gain > best_return) {
          best_return = gain;
          best_index = candidate;
        }
      }

      result.layout.set_role(best_index, players[p].role);
      --limits[p];
      result.steps.push_back(
          GreedyStep{p, result.layout.region_at(best_index).id, best_return});
    }
    any_moves = std::accumulate(limits.begin(), limits.end(), 0) > 0;
  }
  return result;
}

CityLayout mutate(const CityLayout& layout, Rng& rng, const GAConfig& cfg) {
  const std::vector<std::size_t> movable = mutable_indices(layout);
  if (movable.size() < 2) return layout;

  CityLayout mutated = layout;
  for (int s = 0; s < cfg.swaps_per_mutation; ++s) {
    const std::size_t ai = rng.below(movable.size());
    std::size_t bi = rng.below(movable.size() - 1);
    if (bi >= ai) ++bi;  // distinct partner, still uniform
    const std::size_t a = movable[ai];
    const std::size_t b = movable[bi];
    const LandUseType tmp = mutated.role_at(a);
    mutated.set_role(a, mutated.role_at(b));
    mutated.set_role(b, tmp);
  }
  return mutated;
}

Expected<Population> initialize_population(const CityLayout& seed_layout, const GAConfig& cfg) {
  if (Status s = validate_ga_config(cfg); !s.ok()) return s.error();
  Population population;
  population.layouts.reserve(std::size_t(cfg.population_size));
  population.layouts.push_back(seed_layout);
  for (int i = 1; i < cfg.population_size; ++i) {
    Rng rng = Rng::for_stream(cfg.rng_seed, 0, std::uint64_t(i));
    population.layouts.push_back(mutate(seed_layout, rng, cfg));
  }
  return population;
}

Expected<EvolveResult> evolve(const Population& initial, const GAConfig& cfg) {
  if (Status s = validate_ga_config(cfg); !s.ok()) return s.error();
  if (initial.layouts.empty()) {
    return make_error(Errc::kInvalidConfig, "population is empty");
  }
  if (int(initial.layouts.size()) != cfg.population_size) {
    return make_error(Errc::kInvalidConfig, "population size does not match the configuration");
  }

  const std::size_t n = initial.layouts.size();
  std::vector<CityLayout> population = initial.layouts;
  std::vector<double> fits(n);

  auto evaluate = [&]() -> Status {
    for (std::size_t i = 0; i < n; ++i) {
      Expected<double> f = fitness(population[i], cfg);
      if (!f.ok()) return f.error();
      fits[i] = f.value();
    }
    return Status();
  };
  auto record = [&](int generation, EvolveResult& result) {
    double best = fits[0];
    double sum = 0.0;
    for (double f : fits) {
      best = std::max(best, f);
      sum += f;
    }
    result.trace.push_back(GenerationStat{generation, best, sum / double(n)});
    return best;
  };

  EvolveResult result;
  if (Status s = evaluate(); !s.ok()) return s.error();
  double previous_best = record(0, result);
  int stale = 0;

  for (int g = 1; g <= cfg.generations; ++g) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fits[a] > fits[b]; });

    std::vector<CityLayout> next;
    next.reserve(n);
    for (int e = 0; e < cfg.elite_count; ++e) next.push_back(population[order[std::size_t(e)]]);
    for (std::size_t slot = std::size_t(cfg.elite_count); slot < n; ++slot) {
      Rng rng = Rng::for_stream(cfg.rng_seed, std::uint64_t(g), std::uint64_t(slot));
      const std::size_t parent = tournament_pick(fits, cfg.tournament_size, rng);
      next.push_back(mutate(population[parent], rng, cfg));
    }

    population = std::move(next);
    if (Status s = evaluate(); !s.ok()) return s.error();
    const double best = record(g, result);

    if (cfg.plateau_patience > 0) {
      stale = best - previous_best <= cfg.plateau_epsilon ? stale + 1 : 0;
      if (stale >= cfg.plateau_patience) {
        previous_best = best;
        break;
      }
    }
    previous_best = best;
  }

  std::size_t best_index = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (fits[i] > fits[best_index]) best_index = i;
  }
  result.best = population[best_index];
  return result;
}

Expected<OptimizeResult> optimize(const CityLayout& initial, std::span<const Player> players,
                                  const GAConfig& cfg) {
  if (Status s = validate_ga_config(cfg); !s.ok()) return s.error();
  Expected<GreedyResult> greedy = greedy_assign(initial, players, cfg);
  if (!greedy.ok()) return greedy.error();
  Expected<Population> population = initialize_population(greedy.value().layout, cfg);
  if (!population.ok()) return population.error();
  Expected<EvolveResult> evolved = evolve(population.value(), cfg);
  if (!evolved.ok()) return evolved.error();

  OptimizeResult result;
  result.layout = std::move(evolved.value().best);
  result.greedy_steps = std::move(greedy.value().steps);
  result.trace = std::move(evolved.value().trace);
  return result;
}

}  // namespace urbanforge
