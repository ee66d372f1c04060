#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urbanforge/pipeline.hpp"

namespace {

using urbanforge::OnLlmError;
using urbanforge::PipelineConfig;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct IngestArgs {
  std::optional<std::int64_t> min_area;
  std::vector<double> hsv_tolerance;  // h,s,v
  std::optional<std::string> mask;
};

// Loads the config file and lays the command-line overrides on top.
int resolve_config(const GlobalArgs& global, const IngestArgs& ingest, PipelineConfig& cfg,
                   std::ostream& err) {
  if (global.config_path.empty()) {
    err << "InvalidConfig: --config is required\n";
    return 2;
  }
  auto loaded = urbanforge::load_pipeline_config(global.config_path);
  if (!loaded.ok()) {
    err << urbanforge::errc_name(loaded.error().code) << ": " << loaded.error().message << "\n";
    return urbanforge::exit_code_for(loaded.error().code);
  }
  cfg = std::move(loaded).value();
  if (global.seed.has_value()) cfg.ga.rng_seed = *global.seed;
  if (global.out_dir.has_value()) cfg.out_dir = *global.out_dir;
  if (ingest.min_area.has_value()) cfg.min_area = *ingest.min_area;
  if (!ingest.hsv_tolerance.empty()) {
    cfg.h_tol = ingest.hsv_tolerance[0];
    cfg.s_tol = ingest.hsv_tolerance[1];
    cfg.v_tol = ingest.hsv_tolerance[2];
  }
  if (ingest.mask.has_value()) cfg.ingest_mask_path = *ingest.mask;
  if (auto st = urbanforge::validate_pipeline_config(cfg); !st.ok()) {
    err << urbanforge::errc_name(st.error().code) << ": " << st.error().message << "\n";
    return 2;
  }
  return 0;
}

OnLlmError parse_on_llm_error(const std::string& value) {
  return value == "heuristic" ? OnLlmError::kHeuristic : OnLlmError::kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urbanforge: land-use layout optimization from thematic maps"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs global;
  app.add_option("--config", global.config_path, "Run configuration file")->required();
  app.add_option("--seed", global.seed, "Override the optimizer RNG seed");
  app.add_option("--out", global.out_dir, "Override the output directory");

  IngestArgs ingest_args;
  std::string on_llm_error = "fail";
  bool skip_plan = false;
  std::optional<int> rounds;
  std::string input_path;
  std::string stage_label = "stage1";

  CLI::App* ingest = app.add_subcommand("ingest", "Segment the map into a region inventory");
  ingest->add_option("--min-area", ingest_args.min_area, "Minimum component area in pixels");
  ingest
      ->add_option("--hsv-tolerance", ingest_args.hsv_tolerance,
                   "Legend window half-widths: hue(deg),saturation,value")
      ->delimiter(',')
      ->expected(3);
  ingest->add_option("--mask", ingest_args.mask, "City-boundary mask PNG");

  CLI::App* optimize = app.add_subcommand("optimize", "Greedy claims plus GA refinement");
  optimize->add_option("--inventory", input_path, "Inventory or layout JSON to start from");

  CLI::App* plan = app.add_subcommand("plan", "Regional proposals and master integration");
  plan->add_option("--layout", input_path, "Stage-2 layout JSON");
  plan->add_option("--on-llm-error", on_llm_error, "fail | heuristic")
      ->check(CLI::IsMember({"fail", "heuristic"}));
  plan->add_option("--rounds", rounds, "Propose-integrate rounds");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a layout file");
  evaluate->add_option("--layout", input_path, "Layout JSON to score")->required();
  evaluate->add_option("--stage", stage_label, "Stage label for the metrics row");

  CLI::App* pipeline = app.add_subcommand("pipeline", "All three stages end to end");
  pipeline->add_flag("--skip-plan", skip_plan, "Stop after Stage 2");
  pipeline->add_option("--on-llm-error", on_llm_error, "fail | heuristic")
      ->check(CLI::IsMember({"fail", "heuristic"}));
  pipeline->add_option("--rounds", rounds, "Propose-integrate rounds");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig cfg;
  if (int rc = resolve_config(global, ingest_args, cfg, std::cerr); rc != 0) return rc;
  if (rounds.has_value()) cfg.rounds = *rounds;
  if (auto st = urbanforge::validate_pipeline_config(cfg); !st.ok()) {
    std::cerr << urbanforge::errc_name(st.error().code) << ": " << st.error().message << "\n";
    return 2;
  }

  if (ingest->parsed()) {
    return urbanforge::cmd_ingest(cfg);
  }
  if (optimize->parsed()) {
    if (input_path.empty()) {
      input_path = (std::filesystem::path(cfg.out_dir) / urbanforge::artifact::kInventory)
                       .string();
    }
    return urbanforge::cmd_optimize(cfg, input_path);
  }
  if (plan->parsed()) {
    if (input_path.empty()) {
      input_path = (std::filesystem::path(cfg.out_dir) / urbanforge::artifact::kStage2Layout)
                       .string();
    }
    return urbanforge::cmd_plan(cfg, input_path, parse_on_llm_error(on_llm_error));
  }
  if (evaluate->parsed()) {
    return urbanforge::cmd_evaluate(cfg, input_path, stage_label);
  }
  return urbanforge::cmd_pipeline(cfg, skip_plan, parse_on_llm_error(on_llm_error));
}
