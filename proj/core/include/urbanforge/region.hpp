#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "urbanforge/errors.hpp"
#include "urbanforge/land_use.hpp"

namespace urbanforge {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// One connected land parcel summarized by identity, ingested role, pixel
// area, and centroid. Geometry never changes after ingestion; only the
// layout's role overlay does.
struct Region {
  std::string id;
  LandUseType land_use = LandUseType::kUnassigned;
  std::int64_t area_px = 0;
  Point centroid;
};

// Map scale and the three walking-distance thresholds, in meters.
struct ScaleConfig {
  double meters_per_pixel = 1.0;
  double service_radius_m = 500.0;
  double ecology_radius_m = 300.0;
  double satisfaction_radius_m = 800.0;
};

Status validate_scale(const ScaleConfig& scale);

// A city layout: the immutable region inventory plus the mutable mapping of
// region ids to roles. Regions keep their inventory order; lookups and
// tie-breaks use the id.
class CityLayout {
 public:
  CityLayout() = default;

  // Builds a layout whose role overlay starts at each region's ingested
  // land_use. Duplicate ids are rejected.
  static Expected<CityLayout> create(std::vector<Region> regions, ScaleConfig scale);

  std::span<const Region> regions() const { return regions_; }
  const ScaleConfig& scale() const { return scale_; }
  std::size_t size() const { return regions_.size(); }

  // Index of a region id, or npos when unknown.
  static constexpr std::size_t npos = std::size_t(-1);
  std::size_t index_of(std::string_view id) const;

  const Region& region_at(std::size_t index) const { return regions_[index]; }
  LandUseType role_at(std::size_t index) const { return assignment_[index]; }
  void set_role(std::size_t index, LandUseType role) { assignment_[index] = role; }

  std::span<const LandUseType> assignment() const { return assignment_; }

  // Region indices currently holding `role`, in ascending id order.
  std::vector<std::size_t> indices_with_role(LandUseType role) const;

  // Region indices sorted by ascending id. Cached at construction; this is
  // the canonical iteration order for metric sums and tie-breaks.
  std::span<const std::size_t> ascending_id_order() const { return by_id_; }

  friend bool operator==(const CityLayout& a, const CityLayout& b) {
    return a.regions_ == b.regions_ && a.assignment_ == b.assignment_;
  }

 private:
  std::vector<Region> regions_;
  std::vector<LandUseType> assignment_;
  std::vector<std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> index_by_id_;
  ScaleConfig scale_;
};

inline bool operator==(const Region& a, const Region& b) {
  return a.id == b.id && a.land_use == b.land_use && a.area_px == b.area_px &&
         a.centroid == b.centroid;
}

}  // namespace urbanforge
