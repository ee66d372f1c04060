#include "urbanforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace urbanforge {

namespace {

double pixel_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Nearest-facility distance in meters, +infinity when the type is absent.
double nearest_or_inf(Point resident, std::span<const Point> facilities,
                      const ScaleConfig& scale) {
  if (facilities.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Point& facility : facilities) {
    best = std::min(best, pixel_distance(resident, facility));
  }
  return best * scale.meters_per_pixel;
}

bool centroid_in_mask(Point centroid, const BinaryMask& mask) {
  const int cx = int(std::floor(centroid.x));
  const int cy = int(std::floor(centroid.y));
  return mask.in_bounds(cx, cy) && mask.test(cx, cy);
}

}  // namespace

Status validate_services(const EssentialServices& services) {
  if (services.types.empty()) {
    return Status(Errc::kInvalidConfig, "essential service list is empty");
  }
  for (LandUseType type : services.types) {
    if (type == LandUseType::kResidential || type == LandUseType::kVacantLand ||
        type == LandUseType::kUnassigned) {
      return Status(Errc::kInvalidConfig,
                    std::string(land_use_name(type)) + " cannot be an essential service");
    }
  }
  return Status();
}

std::vector<Point> resident_locations(const CityLayout& layout) {
  return facility_locations(layout, LandUseType::kResidential);
}

std::vector<Point> facility_locations(const CityLayout& layout, LandUseType role) {
  std::vector<Point> points;
  for (std::size_t index : layout.ascending_id_order()) {
    if (layout.role_at(index) == role) points.push_back(layout.region_at(index).centroid);
  }
  return points;
}

Expected<double> min_distance_m(Point resident, std::span<const Point> facilities,
                                const ScaleConfig& scale) {
  if (facilities.empty()) {
    return make_error(Errc::kNoFacilityOfType, "no facility of the requested type");
  }
  return nearest_or_inf(resident, facilities, scale);
}

Expected<double> service_accessibility(const CityLayout& layout,
                                       const EssentialServices& services) {
  if (Status s = validate_services(services); !s.ok()) return s.error();
  const std::vector<Point> residents = resident_locations(layout);
  if (residents.empty()) {
    return make_error(Errc::kNoResidents, "layout has no residential regions");
  }

  std::vector<std::vector<Point>> facilities;
  facilities.reserve(services.types.size());
  for (LandUseType type : services.types) {
    facilities.push_back(facility_locations(layout, type));
  }

  const double n_types = double(services.types.size());
  double total = 0.0;
  for (const Point& resident : residents) {
    int reachable = 0;
    for (const std::vector<Point>& of_type : facilities) {
      const double d = nearest_or_inf(resident, of_type, layout.scale());
      if (d < layout.scale().service_radius_m) ++reachable;
    }
    total += double(reachable) / n_types;
  }
  return total / double(residents.size());
}

Expected<double> ecological_coverage(const CityLayout& layout) {
  const std::vector<Point> residents = resident_locations(layout);
  if (residents.empty()) {
    return make_error(Errc::kNoResidents, "layout has no residential regions");
  }
  const std::vector<Point> parks = facility_locations(layout, LandUseType::kParkAndOpenSpace);

  double covered = 0.0;
  for (const Point& resident : residents) {
    const double d = nearest_or_inf(resident, parks, layout.scale());
    // Buffer membership is a closed disk.
    if (d <= layout.scale().ecology_radius_m) covered += 1.0;
  }
  return covered / double(residents.size());
}

Expected<double> satisfaction(const CityLayout& layout, std::span<const SubRegion> subregions,
                              int* orphan_count) {
  const std::vector<Point> residents = resident_locations(layout);
  if (residents.empty()) {
    return make_error(Errc::kNoResidents, "layout has no residential regions");
  }
  for (const SubRegion& sub : subregions) {
    if (Status s = validate_role(sub.role); !s.ok()) return s.error();
  }

  std::vector<std::vector<Point>> facilities(kLegendTypeCount + 1);
  for (LandUseType type : legend_types()) {
    facilities[std::size_t(type)] = facility_locations(layout, type);
  }

  int orphans = 0;
  int counted = 0;
  double total = 0.0;
  for (const Point& resident : residents) {
    const SubRegion* home = nullptr;
    for (const SubRegion& sub : subregions) {
      if (centroid_in_mask(resident, sub.mask)) {
        home = &sub;
        break;
      }
    }
    if (home == nullptr) {
      ++orphans;
      continue;
    }
    int reachable = 0;
    for (LandUseType need : home->role.needs) {
      const double d = nearest_or_inf(resident, facilities[std::size_t(need)], layout.scale());
      if (d < layout.scale().satisfaction_radius_m) ++reachable;
    }
    total += double(reachable) / double(home->role.needs.size());
    ++counted;
  }
  if (orphan_count != nullptr) *orphan_count = orphans;
  if (counted == 0) {
    return make_error(Errc::kNoResidents, "every resident falls outside the sub-region masks");
  }
  return total / double(counted);
}

Expected<MetricsReport> metrics_report(const CityLayout& layout,
                                       const EssentialServices& services,
                                       std::span<const SubRegion> subregions, std::string stage,
                                       int* orphan_count) {
  Expected<double> service = service_accessibility(layout, services);
  if (!service.ok()) return service.error();
  Expected<double> ecology = ecological_coverage(layout);
  if (!ecology.ok()) return ecology.error();
  Expected<double> sat = satisfaction(layout, subregions, orphan_count);
  if (!sat.ok()) return sat.error();

  MetricsReport report;
  report.stage = std::move(stage);
  report.service = service.value();
  report.ecology = ecology.value();
  report.satisfaction = sat.value();
  return report;
}

}  // namespace urbanforge
