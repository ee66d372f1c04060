#pragma once

#include <span>
#include <string>
#include <vector>

#include "urbanforge/image.hpp"
#include "urbanforge/region.hpp"

namespace urbanforge {

// Ordered list of facility categories whose walking-distance coverage the
// service metric averages over. Residential, vacant land, and the sentinel
// are not services.
struct EssentialServices {
  std::vector<LandUseType> types;

  static EssentialServices defaults() {
    return {{LandUseType::kEducational, LandUseType::kHospital, LandUseType::kBusiness,
             LandUseType::kShopsAndMarket, LandUseType::kParkAndOpenSpace}};
  }
};

Status validate_services(const EssentialServices& services);

// One planning sub-region: identity, demographic focus, and the mask that
// decides which regions belong to it.
struct SubRegion {
  std::string id;
  DemographicRole role;
  BinaryMask mask;
};

// The three evaluation metrics for a layout at one pipeline stage.
struct MetricsReport {
  std::string stage;
  double service = 0.0;
  double ecology = 0.0;
  double satisfaction = 0.0;
};

// Resident sample points: one per region currently holding the Residential
// role, in ascending region-id order.
std::vector<Point> resident_locations(const CityLayout& layout);

// Centroids of regions currently holding `role`, ascending id order.
std::vector<Point> facility_locations(const CityLayout& layout, LandUseType role);

// Meters from a resident to the nearest listed facility. An empty facility
// list is an error; metric sums treat that case as an unreachable type
// (indicator 0) instead.
Expected<double> min_distance_m(Point resident, std::span<const Point> facilities,
                                const ScaleConfig& scale);

// Fraction of (resident, service type) pairs with a facility strictly within
// the service radius. Residents outer, listed service types inner.
Expected<double> service_accessibility(const CityLayout& layout,
                                       const EssentialServices& services);

// Fraction of residents within the union of closed ecology-radius buffers
// around parks. No parks means coverage 0.
Expected<double> ecological_coverage(const CityLayout& layout);

// Resident-averaged fraction of demographic needs reachable strictly within
// the satisfaction radius. Each resident's needs come from the first listed
// sub-region whose mask covers its floored centroid; residents outside every
// mask are excluded from the average and counted in *orphan_count when given.
Expected<double> satisfaction(const CityLayout& layout, std::span<const SubRegion> subregions,
                              int* orphan_count = nullptr);

// All three metrics for one stage label.
Expected<MetricsReport> metrics_report(const CityLayout& layout,
                                       const EssentialServices& services,
                                       std::span<const SubRegion> subregions, std::string stage,
                                       int* orphan_count = nullptr);

}  // namespace urbanforge
