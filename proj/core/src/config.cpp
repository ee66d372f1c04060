#include "urbanforge/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <filesystem>

#include "urbanforge/serialization.hpp"

namespace urbanforge {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_tokens(const std::string& value) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : value) {
    if (c == ' ' || c == '\t') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Expected<double> parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    return make_error(Errc::kInvalidConfig, key + ": '" + value + "' is not a number");
  }
  return parsed;
}

Expected<std::int64_t> parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long parsed = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    return make_error(Errc::kInvalidConfig, key + ": '" + value + "' is not an integer");
  }
  return static_cast<std::int64_t>(parsed);
}

Expected<std::uint64_t> parse_uint(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.front() == '-') {
    return make_error(Errc::kInvalidConfig, key + ": '" + value + "' is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(parsed);
}

Expected<bool> parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  return make_error(Errc::kInvalidConfig, key + ": expected 'true' or 'false'");
}

Expected<LandUseType> parse_type_token(const std::string& key, const std::string& token) {
  const auto type = parse_land_use(token);
  if (!type.has_value() || *type == LandUseType::kUnassigned) {
    return make_error(Errc::kInvalidConfig, key + ": '" + token + "' is not a land-use type");
  }
  return *type;
}

Expected<std::vector<LandUseType>> parse_type_list(const std::string& key,
                                                   const std::string& value) {
  std::vector<LandUseType> types;
  for (const std::string& token : split_tokens(value)) {
    auto type = parse_type_token(key, token);
    if (!type.ok()) return type.error();
    types.push_back(type.value());
  }
  return types;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

LandUseType slug_to_type(const std::string& slug) {
  for (LandUseType type : legend_types()) {
    if (land_use_slug(type) == slug) return type;
  }
  return LandUseType::kUnassigned;
}

const std::array<DemographicKind, 4> kSubRegionOrder = {
    DemographicKind::kIndustrial, DemographicKind::kEducational,
    DemographicKind::kCommercial, DemographicKind::kResidential};

std::string subregion_name(DemographicKind kind) {
  std::string name(demographic_name(kind));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return name;
}

}  // namespace

Expected<std::vector<std::pair<std::string, std::string>>> parse_key_values(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string line = text.substr(start, nl == std::string::npos ? nl : nl - start);
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // '#' opens a comment at line start or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      return make_error(Errc::kParseError,
                        "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      return make_error(Errc::kParseError,
                        "line " + std::to_string(line_no) + ": empty key or value");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

Expected<PipelineConfig> parse_pipeline_config(const std::string& text,
                                               const std::string& base_dir) {
  auto entries = parse_key_values(text);
  if (!entries.ok()) return entries.error();

  PipelineConfig cfg;
  std::map<DemographicKind, std::string> masks;
  std::map<DemographicKind, std::vector<LandUseType>> needs;

  for (const auto& [key, value] : entries.value()) {
    if (key == "map") {
      cfg.map_path = resolve_path(base_dir, value);
    } else if (key == "out_dir") {
      cfg.out_dir = resolve_path(base_dir, value);
    } else if (key == "scale.meters_per_pixel" || key == "scale.service_radius_m" ||
               key == "scale.ecology_radius_m" || key == "scale.satisfaction_radius_m") {
      auto parsed = parse_double(key, value);
      if (!parsed.ok()) return parsed.error();
      if (key == "scale.meters_per_pixel") cfg.scale.meters_per_pixel = parsed.value();
      if (key == "scale.service_radius_m") cfg.scale.service_radius_m = parsed.value();
      if (key == "scale.ecology_radius_m") cfg.scale.ecology_radius_m = parsed.value();
      if (key == "scale.satisfaction_radius_m") cfg.scale.satisfaction_radius_m = parsed.value();
    } else if (key == "ingest.min_area") {
      auto parsed = parse_int(key, value);
      if (!parsed.ok()) return parsed.error();
      cfg.min_area = parsed.value();
    } else if (key == "ingest.h_tol" || key == "ingest.s_tol" || key == "ingest.v_tol") {
      auto parsed = parse_double(key, value);
      if (!parsed.ok()) return parsed.error();
      if (key == "ingest.h_tol") cfg.h_tol = parsed.value();
      if (key == "ingest.s_tol") cfg.s_tol = parsed.value();
      if (key == "ingest.v_tol") cfg.v_tol = parsed.value();
    } else if (key == "ingest.mask") {
      cfg.ingest_mask_path = resolve_path(base_dir, value);
    } else if (key.rfind("legend.", 0) == 0) {
      const LandUseType type = slug_to_type(key.substr(7));
      if (type == LandUseType::kUnassigned) {
        return make_error(Errc::kInvalidConfig, key + ": unknown legend slug");
      }
      const auto tokens = split_tokens(value);
      if (tokens.size() != 3) {
        return make_error(Errc::kInvalidConfig, key + ": expected 'r g b'");
      }
      int rgb[3];
      for (int i = 0; i < 3; ++i) {
        auto parsed = parse_int(key, tokens[i]);
        if (!parsed.ok()) return parsed.error();
        if (parsed.value() < 0 || parsed.value() > 255) {
          return make_error(Errc::kInvalidConfig, key + ": channel out of [0, 255]");
        }
        rgb[i] = static_cast<int>(parsed.value());
      }
      cfg.legend_overrides[type] =
          Rgb{std::uint8_t(rgb[0]), std::uint8_t(rgb[1]), std::uint8_t(rgb[2])};
    } else if (key == "metrics.services") {
      auto types = parse_type_list(key, value);
      if (!types.ok()) return types.error();
      cfg.services.types = std::move(types).value();
    } else if (key == "players") {
      cfg.players.clear();
      for (const std::string& token : split_tokens(value)) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
          return make_error(Errc::kInvalidConfig, "players: expected 'Role:limit', got '" +
                                                      token + "'");
        }
        auto role = parse_type_token(key, token.substr(0, colon));
        if (!role.ok()) return role.error();
        auto limit = parse_int(key, token.substr(colon + 1));
        if (!limit.ok()) return limit.error();
        if (limit.value() < 0) {
          return make_error(Errc::kInvalidConfig, "players: move limit must be >= 0");
        }
        cfg.players.push_back({role.value(), static_cast<int>(limit.value())});
      }
    } else if (key == "ga.population_size" || key == "ga.generations" ||
               key == "ga.elite_count" || key == "ga.swaps_per_mutation" ||
               key == "ga.tournament_size" || key == "ga.plateau_patience") {
      auto parsed = parse_int(key, value);
      if (!parsed.ok()) return parsed.error();
      const int v = static_cast<int>(parsed.value());
      if (key == "ga.population_size") cfg.ga.population_size = v;
      if (key == "ga.generations") cfg.ga.generations = v;
      if (key == "ga.elite_count") cfg.ga.elite_count = v;
      if (key == "ga.swaps_per_mutation") cfg.ga.swaps_per_mutation = v;
      if (key == "ga.tournament_size") cfg.ga.tournament_size = v;
      if (key == "ga.plateau_patience") cfg.ga.plateau_patience = v;
    } else if (key == "ga.service_weight" || key == "ga.ecology_weight" ||
               key == "ga.plateau_epsilon") {
      auto parsed = parse_double(key, value);
      if (!parsed.ok()) return parsed.error();
      if (key == "ga.service_weight") cfg.ga.service_weight = parsed.value();
      if (key == "ga.ecology_weight") cfg.ga.ecology_weight = parsed.value();
      if (key == "ga.plateau_epsilon") cfg.ga.plateau_epsilon = parsed.value();
    } else if (key == "ga.seed") {
      auto parsed = parse_uint(key, value);
      if (!parsed.ok()) return parsed.error();
      cfg.ga.rng_seed = parsed.value();
    } else if (key == "policy.action_budget") {
      auto parsed = parse_int(key, value);
      if (!parsed.ok()) return parsed.error();
      cfg.policy.change.action_budget = static_cast<int>(parsed.value());
    } else if (key == "policy.protected_roles") {
      auto types = parse_type_list(key, value);
      if (!types.ok()) return types.error();
      cfg.policy.change.protected_roles = std::move(types).value();
    } else if (key == "policy.allow_reassign_non_vacant") {
      auto parsed = parse_bool(key, value);
      if (!parsed.ok()) return parsed.error();
      cfg.policy.change.allow_reassign_non_vacant = parsed.value();
    } else if (key == "policy.min_satisfaction_gain" || key == "policy.max_service_drop" ||
               key == "policy.max_ecology_drop") {
      auto parsed = parse_double(key, value);
      if (!parsed.ok()) return parsed.error();
      if (key == "policy.min_satisfaction_gain") cfg.policy.min_satisfaction_gain = parsed.value();
      if (key == "policy.max_service_drop") cfg.policy.max_service_drop = parsed.value();
      if (key == "policy.max_ecology_drop") cfg.policy.max_ecology_drop = parsed.value();
    } else if (key == "planner.backend") {
      if (value == "heuristic") {
        cfg.backend = PlannerBackend::kHeuristic;
      } else if (value == "remote") {
        cfg.backend = PlannerBackend::kRemote;
      } else {
        return make_error(Errc::kInvalidConfig,
                          "planner.backend: expected 'heuristic' or 'remote'");
      }
    } else if (key == "planner.rounds") {
      auto parsed = parse_int(key, value);
      if (!parsed.ok()) return parsed.error();
      cfg.rounds = static_cast<int>(parsed.value());
    } else if (key.rfind("subregion.", 0) == 0) {
      const auto rest = key.substr(10);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) {
        return make_error(Errc::kInvalidConfig, key + ": expected subregion.<name>.<field>");
      }
      const std::string name = rest.substr(0, dot);
      const std::string field = rest.substr(dot + 1);
      DemographicKind kind = DemographicKind::kIndustrial;
      bool found = false;
      for (DemographicKind k : kSubRegionOrder) {
        if (subregion_name(k) == name) {
          kind = k;
          found = true;
          break;
        }
      }
      if (!found) {
        return make_error(Errc::kInvalidConfig, key + ": unknown sub-region '" + name + "'");
      }
      if (field == "mask") {
        masks[kind] = resolve_path(base_dir, value);
      } else if (field == "needs") {
        auto types = parse_type_list(key, value);
        if (!types.ok()) return types.error();
        needs[kind] = std::move(types).value();
      } else {
        return make_error(Errc::kInvalidConfig, key + ": unknown field '" + field + "'");
      }
    } else {
      return make_error(Errc::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }

  // Sub-regions materialize in the fixed processing order.
  for (DemographicKind kind : kSubRegionOrder) {
    if (masks.find(kind) == masks.end() && needs.find(kind) == needs.end()) continue;
    SubRegionSpec spec;
    spec.id = subregion_name(kind);
    spec.role = default_role(kind);
    if (auto it = needs.find(kind); it != needs.end()) spec.role.needs = it->second;
    if (auto it = masks.find(kind); it != masks.end()) spec.mask_path = it->second;
    cfg.subregions.push_back(std::move(spec));
  }

  cfg.ga.services = cfg.services;
  if (auto st = validate_pipeline_config(cfg); !st.ok()) return st.error();
  return cfg;
}

Expected<PipelineConfig> load_pipeline_config(const std::string& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  auto cfg = parse_pipeline_config(text.value(), base_dir);
  if (!cfg.ok()) return cfg.error();

  const auto must_exist = [](const std::string& p, const std::string& what) -> Status {
    if (!p.empty() && !std::filesystem::exists(p)) {
      return Status(Errc::kInvalidConfig, what + " does not exist: " + p);
    }
    return Status();
  };
  if (auto st = must_exist(cfg.value().map_path, "map image"); !st.ok()) return st.error();
  if (auto st = must_exist(cfg.value().ingest_mask_path, "ingest mask"); !st.ok()) {
    return st.error();
  }
  for (const SubRegionSpec& spec : cfg.value().subregions) {
    if (auto st = must_exist(spec.mask_path, "sub-region mask"); !st.ok()) return st.error();
  }
  return cfg;
}

Status validate_pipeline_config(const PipelineConfig& cfg) {
  if (auto st = validate_scale(cfg.scale); !st.ok()) return st;
  if (cfg.min_area < 1) {
    return Status(Errc::kInvalidConfig, "ingest.min_area must be >= 1");
  }
  if (cfg.h_tol < 0.0 || cfg.h_tol > 180.0) {
    return Status(Errc::kInvalidConfig, "ingest.h_tol must be in [0, 180]");
  }
  if (cfg.s_tol < 0.0 || cfg.s_tol > 1.0 || cfg.v_tol < 0.0 || cfg.v_tol > 1.0) {
    return Status(Errc::kInvalidConfig, "ingest tolerances must be in [0, 1]");
  }
  if (auto st = validate_services(cfg.services); !st.ok()) return st;
  if (auto st = validate_ga_config(cfg.ga); !st.ok()) return st;
  if (auto st = validate_integration_policy(cfg.policy); !st.ok()) return st;
  for (const SubRegionSpec& spec : cfg.subregions) {
    if (auto st = validate_role(spec.role); !st.ok()) return st;
  }
  if (cfg.rounds < 1) {
    return Status(Errc::kInvalidConfig, "planner.rounds must be >= 1");
  }
  return Status();
}

LegendRanges configured_legend_ranges(const PipelineConfig& cfg) {
  LegendRanges ranges = default_legend_ranges(cfg.h_tol, cfg.s_tol, cfg.v_tol);
  for (const auto& [type, color] : cfg.legend_overrides) {
    ranges[type].center = rgb_to_hsv(color);
  }
  return ranges;
}

}  // namespace urbanforge
