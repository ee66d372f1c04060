#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "urbanforge/rng.hpp"
#include "urbanforge/serialization.hpp"

namespace urbanforge::testing {

namespace {

std::filesystem::path unique_temp_path() {
  static std::atomic<std::uint64_t> counter{0};
  const auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();
  char name[64];
  std::snprintf(name, sizeof(name), "urbanforge-%llx-%llu",
                static_cast<unsigned long long>(ticks),
                static_cast<unsigned long long>(counter.fetch_add(1)));
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TempDir::TempDir() : path(unique_temp_path()) { std::filesystem::create_directories(path); }

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

ScaleConfig default_scale() {
  ScaleConfig scale;
  scale.meters_per_pixel = 20.0;
  return scale;
}

Region make_region(std::string id, LandUseType type, double x, double y, std::int64_t area) {
  Region r;
  r.id = std::move(id);
  r.land_use = type;
  r.area_px = area;
  r.centroid = {x, y};
  return r;
}

CityLayout make_city(std::vector<Region> regions, ScaleConfig scale) {
  auto city = CityLayout::create(std::move(regions), scale);
  if (!city.ok()) throw std::runtime_error("fixture city rejected: " + city.error().message);
  return std::move(city.value());
}

CityLayout random_city(std::uint64_t seed, std::size_t region_count) {
  Rng rng(seed);
  std::vector<Region> regions;
  regions.reserve(region_count);
  for (std::size_t i = 0; i < region_count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "rgn-%03zu", i);
    const LandUseType type =
        i == 0 ? LandUseType::kResidential : legend_types()[rng.below(kLegendTypeCount)];
    const double x = double(rng.below(640)) / 10.0;
    const double y = double(rng.below(640)) / 10.0;
    regions.push_back(make_region(id, type, x, y, 20 + std::int64_t(rng.below(80))));
  }
  return make_city(std::move(regions), default_scale());
}

void draw_disk(RasterImage& image, int cx, int cy, int r, Rgb color) {
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy > r * r) continue;
      if (image.in_bounds(cx + dx, cy + dy)) image.at(cx + dx, cy + dy) = color;
    }
  }
}

std::int64_t disk_area(int r) {
  std::int64_t n = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= r * r) ++n;
    }
  }
  return n;
}

BinaryMask quadrant_mask(int width, int height, int quadrant) {
  BinaryMask mask = BinaryMask::filled(width, height, false);
  const bool right = quadrant == 1 || quadrant == 3;
  const bool bottom = quadrant == 2 || quadrant == 3;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if ((x >= width / 2) == right && (y >= height / 2) == bottom) mask.set(x, y, true);
    }
  }
  return mask;
}

std::vector<SubRegion> quadrant_subregions(int width, int height) {
  static constexpr DemographicKind kKinds[] = {
      DemographicKind::kIndustrial,
      DemographicKind::kEducational,
      DemographicKind::kCommercial,
      DemographicKind::kResidential,
  };
  std::vector<SubRegion> subs;
  for (int q = 0; q < 4; ++q) {
    SubRegion sub;
    sub.id = std::string(demographic_name(kKinds[q]));
    sub.role = default_role(kKinds[q]);
    sub.mask = quadrant_mask(width, height, q);
    subs.push_back(std::move(sub));
  }
  return subs;
}

CityLayout twelve_region_city() {
  std::vector<Region> regions;
  regions.push_back(make_region("residential-000", LandUseType::kResidential, 16, 16));
  regions.push_back(make_region("residential-001", LandUseType::kResidential, 48, 16));
  regions.push_back(make_region("residential-002", LandUseType::kResidential, 16, 48));
  regions.push_back(make_region("residential-003", LandUseType::kResidential, 48, 48));
  regions.push_back(make_region("business-000", LandUseType::kBusiness, 10, 16));
  regions.push_back(make_region("educational-000", LandUseType::kEducational, 54, 16));
  regions.push_back(make_region("shops_and_market-000", LandUseType::kShopsAndMarket, 10, 48));
  regions.push_back(make_region("park_and_open_space-000", LandUseType::kParkAndOpenSpace, 54, 48));
  regions.push_back(make_region("vacant_land-000", LandUseType::kVacantLand, 16, 10));
  regions.push_back(make_region("vacant_land-001", LandUseType::kVacantLand, 48, 10));
  regions.push_back(make_region("vacant_land-002", LandUseType::kVacantLand, 16, 54));
  regions.push_back(make_region("vacant_land-003", LandUseType::kVacantLand, 48, 54));
  return make_city(std::move(regions), default_scale());
}

namespace {

struct Slot {
  int x = 0;
  int y = 0;
  LandUseType type = LandUseType::kVacantLand;
};

// 27 disks on an 8 px grid, radius 3 (29 px each). Quadrant demographics:
// TL industrial, TR educational, BL commercial, BR residential. Hospital and
// public utilities are absent so Stage 3 always has an unmet need to fill.
const std::vector<Slot>& acceptance_slots() {
  static const std::vector<Slot> slots = {
      // top-left
      {28, 28, LandUseType::kResidential},
      {4, 4, LandUseType::kParkAndOpenSpace},
      {12, 4, LandUseType::kEducational},
      {4, 12, LandUseType::kBusiness},
      {12, 12, LandUseType::kStateGovtProperty},
      {20, 20, LandUseType::kVacantLand},
      {28, 20, LandUseType::kVacantLand},
      // top-right
      {36, 28, LandUseType::kResidential},
      {60, 4, LandUseType::kParkAndOpenSpace},
      {52, 4, LandUseType::kShopsAndMarket},
      {60, 12, LandUseType::kBusiness},
      {52, 12, LandUseType::kStateGovtProperty},
      {36, 20, LandUseType::kVacantLand},
      {44, 20, LandUseType::kVacantLand},
      // bottom-left
      {28, 36, LandUseType::kResidential},
      {4, 60, LandUseType::kShopsAndMarket},
      {20, 44, LandUseType::kEducational},
      {4, 44, LandUseType::kStateGovtProperty},
      {20, 36, LandUseType::kVacantLand},
      {28, 44, LandUseType::kVacantLand},
      // bottom-right
      {36, 36, LandUseType::kResidential},
      {60, 60, LandUseType::kEducational},
      {52, 60, LandUseType::kBusiness},
      {52, 52, LandUseType::kStateGovtProperty},
      {44, 36, LandUseType::kVacantLand},
      {36, 44, LandUseType::kVacantLand},
      {44, 44, LandUseType::kVacantLand},
  };
  return slots;
}

constexpr int kAcceptanceMapSize = 64;

}  // namespace

CityLayout acceptance_city() {
  // Ids mirror ingestion: per type in legend order, numbered by raster-scan
  // order of the component's first pixel (here, by centroid y then x).
  std::vector<Region> regions;
  for (LandUseType type : legend_types()) {
    std::vector<Slot> of_type;
    for (const Slot& s : acceptance_slots()) {
      if (s.type == type) of_type.push_back(s);
    }
    std::stable_sort(of_type.begin(), of_type.end(), [](const Slot& a, const Slot& b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    for (std::size_t i = 0; i < of_type.size(); ++i) {
      char id[48];
      std::snprintf(id, sizeof(id), "%s-%03zu", std::string(land_use_slug(type)).c_str(), i);
      regions.push_back(
          make_region(id, type, of_type[i].x, of_type[i].y, disk_area(3)));
    }
  }
  return make_city(std::move(regions), default_scale());
}

std::string write_acceptance_fixture(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  RasterImage map = RasterImage::filled(kAcceptanceMapSize, kAcceptanceMapSize, {255, 255, 255});
  for (const Slot& s : acceptance_slots()) {
    auto color = legend_color(s.type);
    assert(color.ok());
    draw_disk(map, s.x, s.y, 3, color.value());
  }
  Status st = save_png(map, (dir / "map.png").string());
  if (!st.ok()) throw std::runtime_error("fixture map: " + st.error().message);

  static constexpr const char* kMaskNames[] = {"mask_industrial.png", "mask_educational.png",
                                               "mask_commercial.png", "mask_residential.png"};
  for (int q = 0; q < 4; ++q) {
    st = save_mask_png(quadrant_mask(kAcceptanceMapSize, kAcceptanceMapSize, q),
                       (dir / kMaskNames[q]).string());
    if (!st.ok()) throw std::runtime_error("fixture mask: " + st.error().message);
  }

  const std::string config_text =
      "# synthetic 27-region benchmark city\n"
      "map = map.png\n"
      "out_dir = out\n"
      "scale.meters_per_pixel = 20\n"
      "players = Educational:1 Business:1 ShopsAndMarket:1 ParkAndOpenSpace:2\n"
      "ga.seed = 7\n"
      "subregion.industrial.mask = mask_industrial.png\n"
      "subregion.educational.mask = mask_educational.png\n"
      "subregion.commercial.mask = mask_commercial.png\n"
      "subregion.residential.mask = mask_residential.png\n";
  const std::string config_path = (dir / "city.conf").string();
  st = write_text_file(config_path, config_text);
  if (!st.ok()) throw std::runtime_error("fixture config: " + st.error().message);
  return config_path;
}

}  // namespace urbanforge::testing
