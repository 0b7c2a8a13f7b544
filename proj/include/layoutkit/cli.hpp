#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "layoutkit/corpus.hpp"
#include "layoutkit/instruct.hpp"
#include "layoutkit/llm.hpp"
#include "layoutkit/planner.hpp"
#include "layoutkit/report.hpp"

namespace layoutkit::cli {

// Stable exit-code contract: 0 success, 2 validation error, 3 network error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNetwork = 3;

int exit_code_for(const std::exception& error);

struct IngestArgs {
  std::filesystem::path input;  // JSONL of raw template records
  std::filesystem::path out;
  corpus::NormalizeOptions normalize;
  bool skip_invalid = false;
  std::string name = "ingested";
};
int cmd_ingest(const IngestArgs& args);

struct SynthArgs {
  std::filesystem::path out;
  corpus::SynthOptions synth;
};
int cmd_synth(const SynthArgs& args);

struct BuildCounts {
  std::int64_t coordinates = 0;
  std::int64_t recovering = 0;
  std::int64_t planning = 0;
};

struct BuildArgs {
  std::filesystem::path corpus_dir;
  std::filesystem::path out;
  std::vector<instruct::TaskKind> tasks;  // empty = all three
  std::string split = "all";              // train | val | all
  int max_components = 0;                 // 0 = no cap
};
BuildCounts build_instructions(const corpus::Corpus& corpus, const BuildArgs& args);
int cmd_build(const BuildArgs& args);

struct PlanArgs {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_file;
  planner::PlannerConfig config;
  std::string split = "val";
  std::string mode = "auto";  // auto | blank | poster
};
void plan_corpus(const corpus::Corpus& corpus, const PlanArgs& args);
int cmd_plan(const PlanArgs& args);

struct BaselineArgs {
  std::filesystem::path corpus_dir;
  llm::EndpointConfig endpoint;
  llm::BaselineOptions options;
  std::filesystem::path transcript;  // empty = no transcript log
};
int cmd_baseline(const BaselineArgs& args);

struct RenderArgs {
  std::filesystem::path corpus_dir;
  std::filesystem::path predictions;
  std::filesystem::path out_dir;
  int scale = 2;  // nearest-neighbor upscale of the side-by-side panel
};
int cmd_render(const RenderArgs& args);

struct EvalArgs {
  std::filesystem::path corpus_dir;
  std::filesystem::path predictions;
  std::filesystem::path out_dir;
  std::string split = "val";
  int max_components = 0;  // 0 = no cap; pairs with the baseline/build flag
  std::string predictor = "predictions";
  bool content_metrics = true;
  bool svg = false;
  std::uint64_t seed = 0;
  nlohmann::json flags;
};
report::EvalReport run_eval(const corpus::Corpus& corpus, const EvalArgs& args);
int cmd_eval(const EvalArgs& args);

struct ValidateArgs {
  std::filesystem::path corpus_dir;
};
int cmd_validate(const ValidateArgs& args);

}  // namespace layoutkit::cli
