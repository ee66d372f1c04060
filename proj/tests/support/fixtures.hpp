#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "urbanforge/config.hpp"
#include "urbanforge/image.hpp"
#include "urbanforge/metrics.hpp"
#include "urbanforge/region.hpp"

namespace urbanforge::testing {

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

Region make_region(std::string id, LandUseType type, double x, double y, std::int64_t area = 29);

ScaleConfig default_scale();

// Wraps CityLayout::create, asserting success.
CityLayout make_city(std::vector<Region> regions, ScaleConfig scale = default_scale());

// Seeded random layout on a 64x64 footprint: region 0 is always residential,
// the rest draw uniform legend roles and positions.
CityLayout random_city(std::uint64_t seed, std::size_t region_count);

// Integer-centered filled disk of radius r (pixels with dx^2+dy^2 <= r^2).
void draw_disk(RasterImage& image, int cx, int cy, int r, Rgb color);
std::int64_t disk_area(int r);

// Quadrant masks: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
BinaryMask quadrant_mask(int width, int height, int quadrant);

// The four default-demographic sub-regions on quadrant masks, in processing
// order industrial, educational, commercial, residential.
std::vector<SubRegion> quadrant_subregions(int width, int height);

// Twelve-region city (one resident, one facility, one vacant per quadrant)
// used by the planner tests. 64x64 footprint, 20 m per pixel.
CityLayout twelve_region_city();

// Writes the synthetic 27-region acceptance city (64x64 map, four quadrant
// masks, config file) into dir and returns the config path.
std::string write_acceptance_fixture(const std::filesystem::path& dir);

// The same city as an in-memory layout, bypassing PNG ingestion.
CityLayout acceptance_city();

}  // namespace urbanforge::testing
