#pragma once

#include <iostream>
#include <string>

#include "urbanforge/config.hpp"

namespace urbanforge {

// What to do when the remote planner backend cannot be reached.
enum class OnLlmError { kFail, kHeuristic };

// Process exit codes: 0 success, 2 input or config error, 3 external-service
// failure.
int exit_code_for(Errc code);

// Artifact names inside out_dir. Fixed so reruns overwrite in place.
namespace artifact {
inline constexpr const char* kInventory = "inventory.json";
inline constexpr const char* kStage2Layout = "stage2_layout.json";
inline constexpr const char* kStage3Layout = "stage3_layout.json";
inline constexpr const char* kTrace = "trace.csv";
inline constexpr const char* kMetricsCsv = "metrics.csv";
inline constexpr const char* kDecisionLog = "decision_log.jsonl";
inline constexpr const char* kPlanReports = "plan_reports.json";
inline constexpr const char* kStage1Png = "stage1_annotated.png";
inline constexpr const char* kStage2Png = "stage2_annotated.png";
inline constexpr const char* kStage3Png = "stage3_annotated.png";
}  // namespace artifact

// Stage 1: segment the configured map, extract regions, write the inventory,
// and print per-type region counts.
int cmd_ingest(const PipelineConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr);

// Stage 2: greedy claims plus GA refinement over the inventory (or layout)
// at inventory_path; writes the stage-2 layout and the fitness trace.
int cmd_optimize(const PipelineConfig& cfg, const std::string& inventory_path,
                 std::ostream& out = std::cout, std::ostream& err = std::cerr);

// Stage 3: one integration round per configured round; writes the stage-3
// layout, the decision log, and before/after metric reports.
int cmd_plan(const PipelineConfig& cfg, const std::string& layout_path, OnLlmError on_error,
             std::ostream& out = std::cout, std::ostream& err = std::cerr);

// Scores a layout file and appends one row to the metrics CSV.
int cmd_evaluate(const PipelineConfig& cfg, const std::string& layout_path,
                 const std::string& stage, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);

// All three stages plus per-stage evaluation and annotated renders.
int cmd_pipeline(const PipelineConfig& cfg, bool skip_plan, OnLlmError on_error,
                 std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace urbanforge
