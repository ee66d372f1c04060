#include "urbanforge/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <iomanip>

#include "urbanforge/serialization.hpp"

namespace urbanforge {
namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

int fail(std::ostream& err, const Error& e) {
  err << errc_name(e.code) << ": " << e.message << "\n";
  return exit_code_for(e.code);
}

Status ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    return Status(Errc::kIoError, "cannot create output directory " + cfg.out_dir);
  }
  return Status();
}

// Loads the configured sub-region masks. Stage 3 needs all four demographics;
// evaluation accepts any non-empty subset.
Expected<std::vector<SubRegion>> load_subregions(const PipelineConfig& cfg, bool require_four) {
  if (require_four && cfg.subregions.size() != 4) {
    return make_error(Errc::kInvalidConfig,
                      "planning needs all 4 sub-region masks; config has " +
                          std::to_string(cfg.subregions.size()));
  }
  if (cfg.subregions.empty()) {
    return make_error(Errc::kInvalidConfig, "no sub-regions configured");
  }
  std::vector<SubRegion> subregions;
  for (const SubRegionSpec& spec : cfg.subregions) {
    if (spec.mask_path.empty()) {
      return make_error(Errc::kInvalidConfig,
                        "sub-region " + spec.id + " has no mask configured");
    }
    auto mask = load_mask_png(spec.mask_path);
    if (!mask.ok()) return mask.error();
    subregions.push_back({spec.id, spec.role, std::move(mask).value()});
  }
  return subregions;
}

Expected<CityLayout> ingest_city(const PipelineConfig& cfg, const RasterImage& image) {
  IngestOptions options;
  options.ranges = configured_legend_ranges(cfg);
  options.min_area = cfg.min_area;
  if (!cfg.ingest_mask_path.empty()) {
    auto mask = load_mask_png(cfg.ingest_mask_path);
    if (!mask.ok()) return mask.error();
    if (mask.value().width != image.width || mask.value().height != image.height) {
      return make_error(Errc::kMaskDimensionMismatch,
                        "ingest mask dimensions do not match the map");
    }
    options.mask = std::move(mask).value();
  }
  auto regions = ingest_map(image, options);
  if (!regions.ok()) return regions.error();
  return CityLayout::create(std::move(regions).value(), cfg.scale);
}

Status render_stage(const CityLayout& layout, int width, int height, const std::string& path) {
  auto image = render_annotated(layout, width, height);
  if (!image.ok()) return image.error();
  return save_png(image.value(), path);
}

std::string format_trace_csv(std::span<const GenerationStat> trace) {
  std::string csv = "generation,best,mean\n";
  char buf[96];
  for (const GenerationStat& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.generation, row.best, row.mean);
    csv += buf;
  }
  return csv;
}

// Collects the four proposals for one round. A planner that cannot produce a
// usable proposal contributes an empty one; transport failure aborts or
// reroutes to the heuristic per on_error.
Expected<std::vector<Proposal>> gather_proposals(const CityLayout& layout,
                                                 const PipelineConfig& cfg,
                                                 std::span<const SubRegion> subregions,
                                                 OnLlmError on_error, std::ostream& err) {
  std::vector<Proposal> proposals;
  for (const SubRegion& subregion : subregions) {
    Status warning;
    auto ctx = build_regional_context(layout, subregion, cfg.services, cfg.policy, &warning);
    if (!ctx.ok()) return ctx.error();
    if (!warning.ok()) {
      err << "warning: " << errc_name(warning.error().code) << ": " << warning.error().message
          << "\n";
    }

    if (cfg.backend == PlannerBackend::kHeuristic) {
      proposals.push_back(heuristic_planner(ctx.value()));
      continue;
    }

    auto options = completion_options_from_env();
    if (!options.ok()) return options.error();
    HttpCompletionClient client(options.value());
    auto proposal = propose(client, ctx.value());
    if (proposal.ok()) {
      proposals.push_back(std::move(proposal).value());
      continue;
    }
    if (proposal.error().code == Errc::kServiceUnavailable) {
      if (on_error == OnLlmError::kFail) return proposal.error();
      err << "warning: completion service unreachable for " << subregion.id
          << "; using the heuristic planner\n";
      proposals.push_back(heuristic_planner(ctx.value()));
      continue;
    }
    err << "warning: " << proposal.error().message << "; proceeding with an empty proposal\n";
    Proposal empty;
    empty.subregion_id = subregion.id;
    empty.kind = subregion.role.kind;
    proposals.push_back(std::move(empty));
  }
  return proposals;
}

void print_report_table(std::ostream& out, const MetricsReport& report) {
  char buf[64];
  out << std::left << std::setw(14) << "Metric" << std::right << std::setw(12) << report.stage
      << "\n";
  std::snprintf(buf, sizeof(buf), "%-14s%12.3f", "Service", report.service);
  out << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%-14s%12.3f", "Ecology", report.ecology);
  out << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%-14s%12.3f", "Satisfaction", report.satisfaction);
  out << buf << "\n";
}

}  // namespace

int exit_code_for(Errc code) {
  return code == Errc::kServiceUnavailable ? 3 : 2;
}

int cmd_ingest(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.map_path.empty()) {
    return fail(err, make_error(Errc::kInvalidConfig, "no map image configured"));
  }
  if (auto st = ensure_out_dir(cfg); !st.ok()) return fail(err, st.error());

  auto image = load_png(cfg.map_path);
  if (!image.ok()) return fail(err, image.error());
  auto layout = ingest_city(cfg, image.value());
  if (!layout.ok()) return fail(err, layout.error());

  const std::string path = join(cfg.out_dir, artifact::kInventory);
  if (auto st = save_inventory(layout.value(), path); !st.ok()) return fail(err, st.error());

  std::size_t total = 0;
  for (LandUseType type : legend_types()) {
    std::size_t count = 0;
    for (const Region& region : layout.value().regions()) {
      if (region.land_use == type) ++count;
    }
    total += count;
    out << land_use_name(type) << " " << count << "\n";
  }
  out << "total " << total << "\n";
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_optimize(const PipelineConfig& cfg, const std::string& inventory_path, std::ostream& out,
                 std::ostream& err) {
  if (auto st = ensure_out_dir(cfg); !st.ok()) return fail(err, st.error());
  auto initial = load_layout(inventory_path);
  if (!initial.ok()) return fail(err, initial.error());

  auto result = optimize(initial.value(), cfg.players, cfg.ga);
  if (!result.ok()) return fail(err, result.error());

  const std::string layout_path = join(cfg.out_dir, artifact::kStage2Layout);
  if (auto st = save_layout(result.value().layout, layout_path); !st.ok()) {
    return fail(err, st.error());
  }
  const std::string trace_path = join(cfg.out_dir, artifact::kTrace);
  if (auto st = write_text_file(trace_path, format_trace_csv(result.value().trace)); !st.ok()) {
    return fail(err, st.error());
  }

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", result.value().trace.back().best);
  out << "greedy claims " << result.value().greedy_steps.size() << "\n";
  out << "generations " << result.value().trace.size() - 1 << "\n";
  out << "best fitness " << buf << "\n";
  out << "wrote " << layout_path << "\n";
  return 0;
}

int cmd_plan(const PipelineConfig& cfg, const std::string& layout_path, OnLlmError on_error,
             std::ostream& out, std::ostream& err) {
  if (auto st = ensure_out_dir(cfg); !st.ok()) return fail(err, st.error());
  auto loaded = load_layout(layout_path);
  if (!loaded.ok()) return fail(err, loaded.error());
  CityLayout layout = std::move(loaded).value();

  auto subregions = load_subregions(cfg, /*require_four=*/true);
  if (!subregions.ok()) return fail(err, subregions.error());

  auto before = metrics_report(layout, cfg.services, subregions.value(), "before");
  if (!before.ok()) return fail(err, before.error());

  std::vector<Decision> log;
  for (int round = 0; round < cfg.rounds; ++round) {
    auto proposals = gather_proposals(layout, cfg, subregions.value(), on_error, err);
    if (!proposals.ok()) return fail(err, proposals.error());
    auto integrated =
        integrate(layout, proposals.value(), cfg.policy, cfg.services, subregions.value());
    if (!integrated.ok()) return fail(err, integrated.error());
    layout = std::move(integrated.value().layout);
    for (Decision& decision : integrated.value().log) log.push_back(std::move(decision));
  }

  auto after = metrics_report(layout, cfg.services, subregions.value(), "after");
  if (!after.ok()) return fail(err, after.error());

  const std::string stage3_path = join(cfg.out_dir, artifact::kStage3Layout);
  if (auto st = save_layout(layout, stage3_path); !st.ok()) return fail(err, st.error());
  const std::string log_path = join(cfg.out_dir, artifact::kDecisionLog);
  if (auto st = write_text_file(log_path, decision_log_to_jsonl(log)); !st.ok()) {
    return fail(err, st.error());
  }
  nlohmann::ordered_json reports;
  reports["before"] = report_to_json(before.value());
  reports["after"] = report_to_json(after.value());
  const std::string reports_path = join(cfg.out_dir, artifact::kPlanReports);
  if (auto st = write_text_file(reports_path, reports.dump(2) + "\n"); !st.ok()) {
    return fail(err, st.error());
  }

  std::size_t accepted = 0;
  for (const Decision& decision : log) {
    if (decision.accepted) ++accepted;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "satisfaction %.3f -> %.3f", before.value().satisfaction,
                after.value().satisfaction);
  out << "decisions " << log.size() << ", accepted " << accepted << "\n";
  out << buf << "\n";
  out << "wrote " << stage3_path << "\n";
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg, const std::string& layout_path,
                 const std::string& stage, std::ostream& out, std::ostream& err) {
  if (auto st = ensure_out_dir(cfg); !st.ok()) return fail(err, st.error());
  auto layout = load_layout(layout_path);
  if (!layout.ok()) return fail(err, layout.error());
  auto subregions = load_subregions(cfg, /*require_four=*/false);
  if (!subregions.ok()) return fail(err, subregions.error());

  auto report = metrics_report(layout.value(), cfg.services, subregions.value(), stage);
  if (!report.ok()) return fail(err, report.error());

  const std::string csv_path = join(cfg.out_dir, artifact::kMetricsCsv);
  std::string csv;
  if (fs::exists(csv_path)) {
    auto existing = read_text_file(csv_path);
    if (!existing.ok()) return fail(err, existing.error());
    csv = existing.value();
  } else {
    csv = metrics_csv_header() + "\n";
  }
  csv += metrics_csv_row(report.value()) + "\n";
  if (auto st = write_text_file(csv_path, csv); !st.ok()) return fail(err, st.error());

  print_report_table(out, report.value());
  return 0;
}

int cmd_pipeline(const PipelineConfig& cfg, bool skip_plan, OnLlmError on_error,
                 std::ostream& out, std::ostream& err) {
  if (auto st = ensure_out_dir(cfg); !st.ok()) return fail(err, st.error());

  // A fresh metrics file keeps reruns byte-identical.
  std::error_code ec;
  fs::remove(join(cfg.out_dir, artifact::kMetricsCsv), ec);

  if (int rc = cmd_ingest(cfg, out, err); rc != 0) return rc;
  const std::string inventory_path = join(cfg.out_dir, artifact::kInventory);

  auto map = load_png(cfg.map_path);
  if (!map.ok()) return fail(err, map.error());
  const int width = map.value().width;
  const int height = map.value().height;

  if (int rc = cmd_evaluate(cfg, inventory_path, "stage1", out, err); rc != 0) return rc;
  {
    auto stage1 = load_layout(inventory_path);
    if (!stage1.ok()) return fail(err, stage1.error());
    if (auto st = render_stage(stage1.value(), width, height,
                               join(cfg.out_dir, artifact::kStage1Png));
        !st.ok()) {
      return fail(err, st.error());
    }
  }

  if (int rc = cmd_optimize(cfg, inventory_path, out, err); rc != 0) return rc;
  const std::string stage2_path = join(cfg.out_dir, artifact::kStage2Layout);
  if (int rc = cmd_evaluate(cfg, stage2_path, "stage2", out, err); rc != 0) return rc;
  {
    auto stage2 = load_layout(stage2_path);
    if (!stage2.ok()) return fail(err, stage2.error());
    if (auto st = render_stage(stage2.value(), width, height,
                               join(cfg.out_dir, artifact::kStage2Png));
        !st.ok()) {
      return fail(err, st.error());
    }
  }

  if (skip_plan) {
    out << "pipeline complete (plan skipped)\n";
    return 0;
  }

  if (int rc = cmd_plan(cfg, stage2_path, on_error, out, err); rc != 0) return rc;
  const std::string stage3_path = join(cfg.out_dir, artifact::kStage3Layout);
  if (int rc = cmd_evaluate(cfg, stage3_path, "stage3", out, err); rc != 0) return rc;
  {
    auto stage3 = load_layout(stage3_path);
    if (!stage3.ok()) return fail(err, stage3.error());
    if (auto st = render_stage(stage3.value(), width, height,
                               join(cfg.out_dir, artifact::kStage3Png));
        !st.ok()) {
      return fail(err, st.error());
    }
  }

  out << "pipeline complete\n";
  return 0;
}

}  // namespace urbanforge
