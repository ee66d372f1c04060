#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urbanforge/errors.hpp"

namespace urbanforge {

// Functional role of a land parcel. The nine named categories form the map
// legend; kUnassigned marks parcels that no role has claimed yet and never
// appears in the legend itself.
enum class LandUseType : std::uint8_t {
  kResidential,
  kStateGovtProperty,
  kBusiness,
  kPublicUtilities,
  kShopsAndMarket,
  kEducational,
  kVacantLand,
  kParkAndOpenSpace,
  kHospital,
  kUnassigned,
};

inline constexpr std::size_t kLegendTypeCount = 9;

// The nine legend categories in declaration order.
std::span<const LandUseType> legend_types();

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Legend color for a category. Total over the nine legend types; the
// unassigned sentinel has no color and is rejected.
Expected<Rgb> legend_color(LandUseType type);

// CamelCase wire name, e.g. "ShopsAndMarket". The sentinel prints as
// "Unassigned".
std::string_view land_use_name(LandUseType type);

// Lower-snake identifier used as region-id prefix, e.g. "shops_and_market".
std::string_view land_use_slug(LandUseType type);

// Inverse of land_use_name. Unknown names yield nullopt.
std::optional<LandUseType> parse_land_use(std::string_view name);

// Demographic focus of a planning sub-region.
enum class DemographicKind : std::uint8_t {
  kIndustrial,
  kEducational,
  kCommercial,
  kResidential,
};

std::string_view demographic_name(DemographicKind kind);
std::optional<DemographicKind> parse_demographic(std::string_view name);

// A sub-region's demographic focus plus the 3-5 land-use categories its
// residents most depend on, in priority order.
struct DemographicRole {
  DemographicKind kind = DemographicKind::kResidential;
  std::vector<LandUseType> needs;
};

// Checks the 3..5 size bound and rejects duplicate needs.
Status validate_role(const DemographicRole& role);

// Built-in needs table for the four demographic kinds. Callers may override
// per deployment; these defaults keep small runs self-contained.
DemographicRole default_role(DemographicKind kind);

}  // namespace urbanforge
