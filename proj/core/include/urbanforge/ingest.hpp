#pragma once

#include <map>
#include <optional>
#include <vector>

#include "urbanforge/image.hpp"
#include "urbanforge/region.hpp"

namespace urbanforge {

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

// Standard hexcone conversion.
Hsv rgb_to_hsv(Rgb rgb);

// Acceptance window around a color in HSV space. Hue distance wraps modulo
// 360 degrees.
struct HsvRange {
  Hsv center;
  double h_tol = 4.0;
  double s_tol = 0.08;
  double v_tol = 0.08;

  bool contains(const Hsv& value) const;
};

using LegendRanges = std::map<LandUseType, HsvRange>;

// Windows centered on the nine legend colors. The defaults are tight enough
// that the legend colors stay pairwise disjoint.
LegendRanges default_legend_ranges(double h_tol = 4.0, double s_tol = 0.08, double v_tol = 0.08);

// One mask per legend type: a pixel is set in mask[t] iff its HSV value falls
// in ranges[t]. A pixel claimed by two types means the ranges overlap, which
// is a configuration error reported with the offending coordinate.
Expected<std::map<LandUseType, BinaryMask>> segment_by_legend(const RasterImage& image,
                                                              const LegendRanges& ranges);

// 4-connected components of the mask with at least min_area pixels, one
// Region each. Ids are "<slug>-<nnn>" numbered in raster-scan order of each
// component's first pixel; centroid is the mean of member pixel coordinates.
Expected<std::vector<Region>> extract_regions(const BinaryMask& mask, LandUseType type,
                                              std::int64_t min_area);

// Keeps regions whose centroid, floored to integers, is inside the mask
// bounds and on a white pixel. Order is preserved.
Expected<std::vector<Region>> filter_by_mask(const std::vector<Region>& regions,
                                             const BinaryMask& mask);

// Same, but first checks the mask against the source-map dimensions.
Expected<std::vector<Region>> filter_by_mask(const std::vector<Region>& regions,
                                             const BinaryMask& mask, int map_width,
                                             int map_height);

// Full ingestion: segmentation, per-type component extraction in legend
// order, optional sub-region mask filter.
struct IngestOptions {
  LegendRanges ranges = default_legend_ranges();
  std::int64_t min_area = 20;
  std::optional<BinaryMask> mask;
};

Expected<std::vector<Region>> ingest_map(const RasterImage& image, const IngestOptions& options);

// Draws each region as a filled disk in its role's legend color on a white
// canvas. The disk holds exactly area_px pixels (the pixels nearest the
// centroid), so re-segmenting a rendering recovers areas exactly as long as
// disks stay disjoint. Regions whose role is the unassigned sentinel render
// in the vacant-land color.
Expected<RasterImage> render_annotated(const CityLayout& layout, int width, int height);

}  // namespace urbanforge
