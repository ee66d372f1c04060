// Microbenchmarks for the hot paths: metric evaluation, greedy claims, GA
// evolution, legend segmentation, and component extraction.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "urbanforge/ingest.hpp"
#include "urbanforge/metrics.hpp"
#include "urbanforge/rng.hpp"
#include "urbanforge/solver.hpp"

namespace {

using namespace urbanforge;

ScaleConfig bench_scale() {
  ScaleConfig scale;
  scale.meters_per_pixel = 20.0;
  return scale;
}

// Random city over a 64x64 pixel footprint. Region 0 is always residential
// so every metric has at least one resident to serve.
CityLayout bench_city(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  const auto types = legend_types();
  std::vector<Region> regions;
  regions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Region region;
    region.id = "rgn-" + std::to_string(i);
    region.land_use = i == 0 ? LandUseType::kResidential : types[rng.below(types.size())];
    region.area_px = 25;
    region.centroid = {double(rng.below(640)) / 10.0, double(rng.below(640)) / 10.0};
    regions.push_back(std::move(region));
  }
  auto layout = CityLayout::create(std::move(regions), bench_scale());
  return std::move(layout).value();
}

std::vector<SubRegion> bench_subregions() {
  const DemographicKind kinds[4] = {DemographicKind::kIndustrial, DemographicKind::kEducational,
                                    DemographicKind::kCommercial, DemographicKind::kResidential};
  const char* ids[4] = {"nw", "ne", "sw", "se"};
  std::vector<SubRegion> out;
  for (int q = 0; q < 4; ++q) {
    BinaryMask mask = BinaryMask::filled(64, 64, false);
    const int x0 = (q % 2) * 32;
    const int y0 = (q / 2) * 32;
    for (int y = y0; y < y0 + 32; ++y) {
      for (int x = x0; x < x0 + 32; ++x) mask.set(x, y, true);
    }
    SubRegion sub;
    sub.id = ids[q];
    sub.role = default_role(kinds[q]);
    sub.mask = std::move(mask);
    out.push_back(std::move(sub));
  }
  return out;
}

void BM_ServiceAccessibility(benchmark::State& state) {
  const CityLayout city = bench_city(11, std::size_t(state.range(0)));
  const auto services = EssentialServices::defaults();
  for (auto _ : state) {
    benchmark::DoNotOptimize(service_accessibility(city, services));
  }
}
BENCHMARK(BM_ServiceAccessibility)->Arg(20)->Arg(60)->Arg(200);

void BM_EcologicalCoverage(benchmark::State& state) {
  const CityLayout city = bench_city(12, std::size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ecological_coverage(city));
  }
}
BENCHMARK(BM_EcologicalCoverage)->Arg(20)->Arg(60)->Arg(200);

void BM_Satisfaction(benchmark::State& state) {
  const CityLayout city = bench_city(13, std::size_t(state.range(0)));
  const auto subregions = bench_subregions();
  for (auto _ : state) {
    benchmark::DoNotOptimize(satisfaction(city, subregions));
  }
}
BENCHMARK(BM_Satisfaction)->Arg(20)->Arg(60)->Arg(200);

void BM_GreedyAssign(benchmark::State& state) {
  const CityLayout city = bench_city(14, std::size_t(state.range(0)));
  const std::vector<Player> players{{LandUseType::kHospital, 3},
                                    {LandUseType::kParkAndOpenSpace, 3},
                                    {LandUseType::kBusiness, 2}};
  const GAConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_assign(city, players, cfg));
  }
}
BENCHMARK(BM_GreedyAssign)->Arg(20)->Arg(60);

void BM_Evolve(benchmark::State& state) {
  const CityLayout city = bench_city(15, 30);
  const std::vector<Player> players{{LandUseType::kHospital, 2},
                                    {LandUseType::kEducational, 2}};
  GAConfig cfg;
  cfg.generations = int(state.range(0));
  cfg.rng_seed = 15;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(city, players, cfg));
  }
}
BENCHMARK(BM_Evolve)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SegmentByLegend(benchmark::State& state) {
  // 40 disks on a grid, rendered to a 256x256 map
  Rng rng(16);
  const auto types = legend_types();
  std::vector<Region> regions;
  for (int i = 0; i < 40; ++i) {
    Region region;
    region.id = "disk-" + std::to_string(i);
    region.land_use = types[rng.below(types.size())];
    region.area_px = 100;
    region.centroid = {double(32 * (i % 8) + 16), double(32 * (i / 8) + 16)};
    regions.push_back(std::move(region));
  }
  auto layout = CityLayout::create(std::move(regions), bench_scale());
  auto image = render_annotated(layout.value(), 256, 256);
  const auto ranges = default_legend_ranges();
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_by_legend(image.value(), ranges));
  }
}
BENCHMARK(BM_SegmentByLegend)->Unit(benchmark::kMillisecond);

void BM_ExtractRegions(benchmark::State& state) {
  // 64 diamond blobs in a 256x256 mask
  BinaryMask mask = BinaryMask::filled(256, 256, false);
  for (int i = 0; i < 64; ++i) {
    const int cx = 32 * (i % 8) + 16;
    const int cy = 32 * (i / 8) + 16;
    for (int dy = -5; dy <= 5; ++dy) {
      for (int dx = -5; dx <= 5; ++dx) {
        if (std::abs(dx) + std::abs(dy) <= 5) mask.set(cx + dx, cy + dy, true);
      }
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_regions(mask, LandUseType::kVacantLand, 1));
  }
}
BENCHMARK(BM_ExtractRegions)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
