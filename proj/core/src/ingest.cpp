#include "urbanforge/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace urbanforge {

Hsv rgb_to_hsv(Rgb rgb) {
  const double r = rgb.r / 255.0;
  const double g = rgb.g / 255.0;
  const double b = rgb.b / 255.0;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;

  Hsv out;
  out.v = max;
  out.s = max > 0.0 ? delta / max : 0.0;
  if (delta <= 0.0) {
    out.h = 0.0;
    return out;
  }
  double h;
  if (max == r) {
    h = 60.0 * ((g - b) / delta);
  } else if (max == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

bool HsvRange::contains(const Hsv& value) const {
  double dh = std::fabs(value.h - center.h);
  if (dh > 180.0) dh = 360.0 - dh;
  return dh <= h_tol && std::fabs(value.s - center.s) <= s_tol &&
         std::fabs(value.v - center.v) <= v_tol;
}

LegendRanges default_legend_ranges(double h_tol, double s_tol, double v_tol) {
  LegendRanges ranges;
  for (LandUseType type : legend_types()) {
    HsvRange range;
    range.center = rgb_to_hsv(legend_color(type).value());
    range.h_tol = h_tol;
    range.s_tol = s_tol;
    range.v_tol = v_tol;
    ranges.emplace(type, range);
  }
  return ranges;
}

Expected<std::map<LandUseType, BinaryMask>> segment_by_legend(const RasterImage& image,
                                                              const LegendRanges& ranges) {
  for (LandUseType type : legend_types()) {
    if (ranges.find(type) == ranges.end()) {
      return make_error(Errc::kInvalidConfig,
                        "legend range missing for " + std::string(land_use_name(type)));
    }
  }

  std::map<LandUseType, BinaryMask> masks;
  for (const auto& [type, range] : ranges) {
    masks.emplace(type, BinaryMask::filled(image.width, image.height, false));
  }

  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Hsv hsv = rgb_to_hsv(image.at(x, y));
      const LandUseType* claimed = nullptr;
      for (const auto& [type, range] : ranges) {
        if (!range.contains(hsv)) continue;
        if (claimed != nullptr) {
          char buf[160];
          std::snprintf(buf, sizeof(buf), "pixel (%d, %d) matches both %s and %s", x, y,
                        land_use_name(*claimed).data(), land_use_name(type).data());
          return make_error(Errc::kAmbiguousLegend, buf);
        }
        claimed = &type;
        masks.at(type).set(x, y, true);
      }
    }
  }
  return masks;
}

Expected<std::vector<Region>> extract_regions(const BinaryMask& mask, LandUseType type,
                                              std::int64_t min_area) {
  if (min_area < 1) {
    return make_error(Errc::kInvalidConfig, "min_area must be at least 1");
  }

  std::vector<std::uint8_t> visited(mask.bits.size(), 0);
  std::vector<Region> regions;
  std::deque<std::pair<int, int>> queue;

  for (int y0 = 0; y0 < mask.height; ++y0) {
    for (int x0 = 0; x0 < mask.width; ++x0) {
      const std::size_t start = std::size_t(y0) * mask.width + x0;
      if (mask.bits[start] == 0 || visited[start] != 0) continue;

      // Flood one 4-connected component. Coordinate sums stay integral, so
      // the centroid is exact regardless of traversal order.
      std::int64_t area = 0;
      std::int64_t sum_x = 0;
      std::int64_t sum_y = 0;
      visited[start] = 1;
      queue.emplace_back(x0, y0);
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        ++area;
        sum_x += x;
        sum_y += y;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k];
          const int ny = y + dy[k];
          if (!mask.in_bounds(nx, ny)) continue;
          const std::size_t ni = std::size_t(ny) * mask.width + nx;
          if (mask.bits[ni] == 0 || visited[ni] != 0) continue;
          visited[ni] = 1;
          queue.emplace_back(nx, ny);
        }
      }

      if (area < min_area) continue;
      Region region;
      char id[64];
      std::snprintf(id, sizeof(id), "%s-%03zu", land_use_slug(type).data(), regions.size());
      region.id = id;
      region.land_use = type;
      region.area_px = area;
      region.centroid = Point{double(sum_x) / double(area), double(sum_y) / double(area)};
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

Expected<std::vector<Region>> filter_by_mask(const std::vector<Region>& regions,
                                             const BinaryMask& mask) {
  std::vector<Region> kept;
  for (const Region& region : regions) {
    const int cx = int(std::floor(region.centroid.x));
    const int cy = int(std::floor(region.centroid.y));
    if (!mask.in_bounds(cx, cy)) continue;
    if (mask.test(cx, cy)) kept.push_back(region);
  }
  return kept;
}

Expected<std::vector<Region>> filter_by_mask(const std::vector<Region>& regions,
                                             const BinaryMask& mask, int map_width,
                                             int map_height) {
  if (mask.width != map_width || mask.height != map_height) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mask is %dx%d but the map is %dx%d", mask.width, mask.height,
                  map_width, map_height);
    return make_error(Errc::kMaskDimensionMismatch, buf);
  }
  return filter_by_mask(regions, mask);
}

Expected<std::vector<Region>> ingest_map(const RasterImage& image, const IngestOptions& options) {
  Expected<std::map<LandUseType, BinaryMask>> masks = segment_by_legend(image, options.ranges);
  if (!masks.ok()) return masks.error();

  std::vector<Region> regions;
  for (LandUseType type : legend_types()) {
    Expected<std::vector<Region>> extracted =
        extract_regions(masks.value().at(type), type, options.min_area);
    if (!extracted.ok()) return extracted.error();
    for (Region& region : extracted.value()) regions.push_back(std::move(region));
  }

  if (options.mask.has_value()) {
    return filter_by_mask(regions, *options.mask, image.width, image.height);
  }
  return regions;
}

Expected<RasterImage> render_annotated(const CityLayout& layout, int width, int height) {
  if (width <= 0 || height <= 0) {
    return make_error(Errc::kInvalidConfig, "canvas dimensions must be positive");
  }
  RasterImage canvas = RasterImage::filled(width, height, Rgb{255, 255, 255});

  struct Candidate {
    double dist2;
    int x;
    int y;
  };
  std::vector<Candidate> candidates;

  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Region& region = layout.region_at(i);
    const double cx = region.centroid.x;
    const double cy = region.centroid.y;
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
      return make_error(Errc::kRenderOutOfBounds, "centroid of " + region.id + " is off canvas");
    }
    LandUseType role = layout.role_at(i);
    if (role == LandUseType::kUnassigned) role = LandUseType::kVacantLand;
    const Rgb color = legend_color(role).value();

    // Exact-area disk: the area_px canvas pixels nearest the centroid, ties
    // broken in raster order. Grow the candidate radius until enough in-
    // canvas pixels are available.
    const std::int64_t want = std::min<std::int64_t>(region.area_px,
                                                     std::int64_t(width) * height);
    double radius = std::sqrt(double(want) / 3.141592653589793) + 2.0;
    candidates.clear();
    while (std::int64_t(candidates.size()) < want) {
      candidates.clear();
      const int x_lo = std::max(0, int(std::floor(cx - radius)));
      const int x_hi = std::min(width - 1, int(std::ceil(cx + radius)));
      const int y_lo = std::max(0, int(std::floor(cy - radius)));
      const int y_hi = std::min(height - 1, int(std::ceil(cy + radius)));
      for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
          const double dx = x - cx;
          const double dy = y - cy;
          const double d2 = dx * dx + dy * dy;
          if (d2 <= radius * radius) candidates.push_back({d2, x, y});
        }
      }
      if (x_lo == 0 && y_lo == 0 && x_hi == width - 1 && y_hi == height - 1 &&
          std::int64_t(candidates.size()) < want) {
        break;  // whole canvas gathered; cannot grow further
      }
      radius *= 1.5;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
      if (a.y != b.y) return a.y < b.y;
      return a.x < b.x;
    });
    const std::size_t take = std::min<std::size_t>(candidates.size(), std::size_t(want));
    for (std::size_t k = 0; k < take; ++k) {
      canvas.at(candidates[k].x, candidates[k].y) = color;
    }
  }
  return canvas;
}

}  // namespace urbanforge
