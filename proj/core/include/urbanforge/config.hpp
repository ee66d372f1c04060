#pragma once

#include <map>
#include <string>
#include <vector>

#include "urbanforge/ingest.hpp"
#include "urbanforge/planner.hpp"
#include "urbanforge/solver.hpp"

namespace urbanforge {

// One planning sub-region as configured: identity, demographic role, and the
// path of its membership mask.
struct SubRegionSpec {
  std::string id;
  DemographicRole role;
  std::string mask_path;
};

// Which planner intelligence backs Stage 3.
enum class PlannerBackend { kHeuristic, kRemote };

// Everything one run needs, assembled from a config file plus command-line
// overrides. Paths are stored resolved against the config file's directory.
struct PipelineConfig {
  std::string map_path;
  std::string out_dir = "out";
  ScaleConfig scale;

  std::int64_t min_area = 20;
  double h_tol = 4.0;
  double s_tol = 0.08;
  double v_tol = 0.08;
  std::string ingest_mask_path;                 // optional city-boundary mask
  std::map<LandUseType, Rgb> legend_overrides;  // per-type color replacements

  EssentialServices services = EssentialServices::defaults();
  std::vector<Player> players;
  GAConfig ga;
  IntegrationPolicy policy;
  std::vector<SubRegionSpec> subregions;  // exactly 4 when Stage 3 runs
  PlannerBackend backend = PlannerBackend::kHeuristic;
  int rounds = 1;
};

// Key-value lines, `key = value`, '#' comments, later keys win. Returned in
// file order.
Expected<std::vector<std::pair<std::string, std::string>>> parse_key_values(
    const std::string& text);

// Parses config text. Relative paths resolve against base_dir; unknown keys
// are errors. Does not touch the filesystem.
Expected<PipelineConfig> parse_pipeline_config(const std::string& text,
                                               const std::string& base_dir);

// Loads, parses, and checks that the referenced map and mask files exist.
Expected<PipelineConfig> load_pipeline_config(const std::string& path);

// Semantic checks shared by parse and tests: scale, GA, policy, roles.
Status validate_pipeline_config(const PipelineConfig& cfg);

// Legend windows for this run: defaults at the configured tolerances, with
// any per-type color overrides recentered.
LegendRanges configured_legend_ranges(const PipelineConfig& cfg);

}  // namespace urbanforge
