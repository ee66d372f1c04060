#include "urbanforge/land_use.hpp"

#include <algorithm>

namespace urbanforge {

namespace {

struct LegendEntry {
  LandUseType type;
  Rgb color;
  std::string_view name;
  std::string_view slug;
};

constexpr std::array<LegendEntry, kLegendTypeCount> kLegend = {{
    {LandUseType::kResidential, {255, 255, 190}, "Residential", "residential"},
    {LandUseType::kStateGovtProperty, {194, 231, 252}, "StateGovtProperty", "state_govt_property"},
    {LandUseType::kBusiness, {192, 209, 254}, "Business", "business"},
    {LandUseType::kPublicUtilities, {255, 235, 190}, "PublicUtilities", "public_utilities"},
    {LandUseType::kShopsAndMarket, {200, 214, 157}, "ShopsAndMarket", "shops_and_market"},
    {LandUseType::kEducational, {254, 191, 229}, "Educational", "educational"},
    {LandUseType::kVacantLand, {214, 194, 158}, "VacantLand", "vacant_land"},
    {LandUseType::kParkAndOpenSpace, {210, 255, 116}, "ParkAndOpenSpace", "park_and_open_space"},
    {LandUseType::kHospital, {255, 190, 190}, "Hospital", "hospital"},
}};

constexpr std::array<LandUseType, kLegendTypeCount> kLegendOrder = {
    LandUseType::kResidential,      LandUseType::kStateGovtProperty,
    LandUseType::kBusiness,         LandUseType::kPublicUtilities,
    LandUseType::kShopsAndMarket,   LandUseType::kEducational,
    LandUseType::kVacantLand,       LandUseType::kParkAndOpenSpace,
    LandUseType::kHospital,
};

const LegendEntry* find_entry(LandUseType type) {
  for (const auto& entry : kLegend) {
    if (entry.type == type) return &entry;
  }
  return nullptr;
}

}  // namespace

std::span<const LandUseType> legend_types() { return kLegendOrder; }

Expected<Rgb> legend_color(LandUseType type) {
  const LegendEntry* entry = find_entry(type);
  if (entry == nullptr) {
    return make_error(Errc::kNotALegendType, "unassigned sentinel carries no legend color");
  }
  return entry->color;
}

std::string_view land_use_name(LandUseType type) {
  const LegendEntry* entry = find_entry(type);
  return entry != nullptr ? entry->name : std::string_view("Unassigned");
}

std::string_view land_use_slug(LandUseType type) {
  const LegendEntry* entry = find_entry(type);
  return entry != nullptr ? entry->slug : std::string_view("unassigned");
}

std::optional<LandUseType> parse_land_use(std::string_view name) {
  for (const auto& entry : kLegend) {
    if (entry.name == name) return entry.type;
  }
  if (name == "Unassigned") return LandUseType::kUnassigned;
  return std::nullopt;
}

std::string_view demographic_name(DemographicKind kind) {
  switch (kind) {
    case DemographicKind::kIndustrial: return "Industrial";
    case DemographicKind::kEducational: return "Educational";
    case DemographicKind::kCommercial: return "Commercial";
    case DemographicKind::kResidential: return "Residential";
  }
  return "Residential";
}

std::optional<DemographicKind> parse_demographic(std::string_view name) {
  if (name == "Industrial") return DemographicKind::kIndustrial;
  if (name == "Educational") return DemographicKind::kEducational;
  if (name == "Commercial") return DemographicKind::kCommercial;
  if (name == "Residential") return DemographicKind::kResidential;
  return std::nullopt;
}

Status validate_role(const DemographicRole& role) {
  if (role.needs.size() < 3 || role.needs.size() > 5) {
    return Status(Errc::kInvalidConfig, "demographic role needs 3 to 5 land-use categories");
  }
  for (std::size_t i = 0; i < role.needs.size(); ++i) {
    for (std::size_t j = i + 1; j < role.needs.size(); ++j) {
      if (role.needs[i] == role.needs[j]) {
        return Status(Errc::kInvalidConfig, "demographic role lists a duplicate need");
      }
    }
  }
  return Status();
}

DemographicRole default_role(DemographicKind kind) {
  switch (kind) {
    case DemographicKind::kIndustrial:
      return {kind,
              {LandUseType::kBusiness, LandUseType::kPublicUtilities, LandUseType::kShopsAndMarket}};
    case DemographicKind::kEducational:
      return {kind,
              {LandUseType::kEducational, LandUseType::kParkAndOpenSpace,
               LandUseType::kShopsAndMarket, LandUseType::kHospital}};
    case DemographicKind::kCommercial:
      return {kind,
              {LandUseType::kBusiness, LandUseType::kShopsAndMarket, LandUseType::kPublicUtilities}};
    case DemographicKind::kResidential:
      return {kind,
              {LandUseType::kHospital, LandUseType::kEducational, LandUseType::kShopsAndMarket,
               LandUseType::kParkAndOpenSpace}};
  }
  return {kind, {LandUseType::kHospital, LandUseType::kEducational, LandUseType::kShopsAndMarket}};
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kNotALegendType: return "NotALegendType";
    case Errc::kUnknownRegion: return "UnknownRegion";
    case Errc::kInvalidAction: return "InvalidAction";
    case Errc::kProtectedRole: return "ProtectedRole";
    case Errc::kNonVacantReassign: return "NonVacantReassign";
    case Errc::kBudgetExceeded: return "BudgetExceeded";
    case Errc::kRegionOccupied: return "RegionOccupied";
    case Errc::kNoResidents: return "NoResidents";
    case Errc::kNoFacilityOfType: return "NoFacilityOfType";
    case Errc::kAmbiguousLegend: return "AmbiguousLegend";
    case Errc::kMaskDimensionMismatch: return "MaskDimensionMismatch";
    case Errc::kRenderOutOfBounds: return "RenderOutOfBounds";
    case Errc::kEmptySubRegion: return "EmptySubRegion";
    case Errc::kParseError: return "ParseError";
    case Errc::kPlannerFailed: return "PlannerFailed";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kIoError: return "IoError";
    case Errc::kServiceUnavailable: return "ServiceUnavailable";
  }
  return "Unknown";
}

}  // namespace urbanforge
