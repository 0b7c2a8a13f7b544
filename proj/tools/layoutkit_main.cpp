#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "layoutkit/cli.hpp"
#include "layoutkit/version.hpp"

namespace {

using namespace layoutkit;

// Default artifact location when --out is not given: runs/<timestamp>-<name>/.
std::filesystem::path make_run_dir(const std::string& name) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::filesystem::path dir = std::filesystem::path("runs") / (std::string(stamp) + "-" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_run_manifest(const std::filesystem::path& dir, const std::string& command,
                        const nlohmann::json& flags) {
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  out << nlohmann::json{{"command", command},
                        {"flags", flags},
                        {"toolkit_version", std::string(kToolkitVersion)}}
             .dump(2)
      << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layoutkit — layout-planning datasets, metrics, planners, and baselines"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags like --config may follow the subcommand
  app.set_config("--config", "", "Read options from a TOML config file");
  app.set_version_flag("--version", std::string(kToolkitVersion));

  // ---- synth ----
  cli::SynthArgs synth;
  std::string synth_profile = "blank_canvas";
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic corpus");
  synth_cmd->add_option("--out", synth_out, "Output corpus directory");
  synth_cmd->add_option("--seed", synth.synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--count", synth.synth.count, "Number of templates")->required();
  synth_cmd->add_option("--profile", synth_profile, "blank_canvas | poster_background")
      ->check(CLI::IsMember({"blank_canvas", "poster_background"}))
      ->capture_default_str();
  synth_cmd->add_option("--val-fraction", synth.synth.val_fraction,
                        "Fraction of templates assigned to the val split")
      ->capture_default_str();

  // ---- ingest ----
  cli::IngestArgs ingest;
  std::string ingest_mode = "area";
  std::string ingest_out;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Normalize a JSONL of raw template records into a corpus");
  ingest_cmd->add_option("--input", ingest.input, "Raw records (JSONL)")->required();
  ingest_cmd->add_option("--out", ingest_out, "Output corpus directory");
  ingest_cmd->add_option("--name", ingest.name, "Corpus name")->capture_default_str();
  ingest_cmd
      ->add_option("--filter-threshold", ingest.normalize.filter_threshold,
                   "Small-element filter threshold")
      ->capture_default_str();
  ingest_cmd->add_option("--max-edge", ingest.normalize.max_edge, "Longest canvas edge")
      ->capture_default_str();
  ingest_cmd->add_option("--filter-mode", ingest_mode, "area | dims")
      ->check(CLI::IsMember({"area", "dims"}))
      ->capture_default_str();
  ingest_cmd->add_flag("--skip-invalid", ingest.skip_invalid,
                       "Warn and continue on invalid records");

  // ---- validate ----
  cli::ValidateArgs validate;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Schema-check a corpus directory");
  validate_cmd->add_option("--corpus", validate.corpus_dir, "Corpus directory")->required();

  // ---- build ----
  cli::BuildArgs build;
  std::vector<std::string> build_tasks;
  std::string build_out;
  CLI::App* build_cmd =
      app.add_subcommand("build", "Emit instruction datasets for the three layout tasks");
  build_cmd->add_option("--corpus", build.corpus_dir, "Corpus directory")->required();
  build_cmd->add_option("--out", build_out, "Output directory");
  build_cmd
      ->add_option("--tasks", build_tasks,
                   "Subset of {coordinates_predicting, layout_recovering, layout_planning}")
      ->check(CLI::IsMember(
          {"coordinates_predicting", "layout_recovering", "layout_planning"}));
  build_cmd->add_option("--split", build.split, "train | val | all")
      ->check(CLI::IsMember({"train", "val", "all"}))
      ->capture_default_str();
  build_cmd
      ->add_option("--max-components", build.max_components,
                   "Skip templates with more components (0 = no cap)")
      ->capture_default_str();

  // ---- plan ----
  cli::PlanArgs plan;
  std::string plan_out;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Run the search-based baseline planners");
  plan_cmd->add_option("--corpus", plan.corpus_dir, "Corpus directory")->required();
  plan_cmd->add_option("--out", plan_out, "Predictions JSONL path");
  plan_cmd->add_option("--split", plan.split, "train | val | all")->capture_default_str();
  plan_cmd->add_option("--mode", plan.mode, "auto | blank | poster")
      ->check(CLI::IsMember({"auto", "blank", "poster"}))
      ->capture_default_str();
  plan_cmd->add_option("--seed", plan.config.seed, "Planner seed")->capture_default_str();
  plan_cmd->add_option("--iterations", plan.config.iterations, "Annealing iterations")
      ->capture_default_str();
  plan_cmd->add_option("--initial-temperature", plan.config.initial_temperature, "")
      ->capture_default_str();
  plan_cmd->add_option("--cooling", plan.config.cooling, "Cooling factor per step")
      ->capture_default_str();
  plan_cmd->add_option("--w-occ", plan.config.w_occ, "Occlusion weight")->capture_default_str();
  plan_cmd->add_option("--w-uti", plan.config.w_uti, "Utility weight")->capture_default_str();
  plan_cmd->add_option("--w-rea", plan.config.w_rea, "Unreadability weight")
      ->capture_default_str();

  // ---- baseline ----
  cli::BaselineArgs baseline;
  std::string baseline_out;
  bool text_only = false;
  CLI::App* baseline_cmd =
      app.add_subcommand("baseline", "Run an external chat-completion model over the val split");
  baseline_cmd->add_option("--corpus", baseline.corpus_dir, "Corpus directory")->required();
  baseline_cmd->add_option("--out", baseline_out, "Predictions JSONL path");
  baseline_cmd->add_option("--cache-dir", baseline.options.cache_dir,
                           "Content-addressed response cache");
  baseline_cmd->add_option("--transcript", baseline.transcript, "Transcript JSONL path");
  baseline_cmd
      ->add_option("--shots", baseline.options.shots,
                   "Demonstrations per request (0 or 1 in the reference protocol)")
      ->capture_default_str();
  baseline_cmd->add_option("--seed", baseline.options.seed, "Demonstration selection seed")
      ->capture_default_str();
  baseline_cmd
      ->add_option("--max-components", baseline.options.max_components,
                   "Skip templates with more components (0 = no cap)")
      ->capture_default_str();
  baseline_cmd->add_option("--base-url", baseline.endpoint.base_url, "Endpoint base URL")
      ->capture_default_str();
  baseline_cmd->add_option("--api-path", baseline.endpoint.path, "Endpoint path")
      ->capture_default_str();
  baseline_cmd->add_option("--model", baseline.endpoint.model, "Model name")
      ->capture_default_str();
  baseline_cmd->add_option("--auth-env", baseline.endpoint.auth_env,
                           "Environment variable holding the API token (empty = none)")
      ->capture_default_str();
  baseline_cmd->add_flag("--text-only", text_only,
                         "Swap images for captions, for endpoints without vision");
  baseline_cmd->add_option("--max-images", baseline.endpoint.max_images, "Image cap per request")
      ->capture_default_str();
  baseline_cmd->add_option("--timeout", baseline.endpoint.timeout_seconds, "Seconds per attempt")
      ->capture_default_str();
  baseline_cmd->add_option("--max-attempts", baseline.endpoint.max_attempts, "Retry budget")
      ->capture_default_str();
  baseline_cmd->add_option("--backoff", baseline.endpoint.backoff_base_seconds,
                           "Base backoff seconds")
      ->capture_default_str();
  baseline_cmd->add_option("--rpm", baseline.endpoint.requests_per_minute, "Requests per minute")
      ->capture_default_str();
  baseline_cmd->add_option("--temperature", baseline.endpoint.temperature, "")
      ->capture_default_str();

  // ---- render ----
  cli::RenderArgs render;
  std::string render_out;
  CLI::App* render_cmd =
      app.add_subcommand("render", "Render side-by-side gold vs predicted previews");
  render_cmd->add_option("--corpus", render.corpus_dir, "Corpus directory")->required();
  render_cmd->add_option("--predictions", render.predictions, "Predictions JSONL")->required();
  render_cmd->add_option("--out", render_out, "Output directory");
  render_cmd->add_option("--scale", render.scale, "Nearest-neighbor upscale factor")
      ->capture_default_str();

  // ---- eval ----
  cli::EvalArgs eval;
  std::string eval_out;
  bool no_content = false;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against the corpus gold");
  eval_cmd->add_option("--corpus", eval.corpus_dir, "Corpus directory")->required();
  eval_cmd->add_option("--predictions", eval.predictions, "Predictions JSONL")->required();
  eval_cmd->add_option("--out", eval_out, "Report output directory");
  eval_cmd->add_option("--split", eval.split, "train | val | all")->capture_default_str();
  eval_cmd
      ->add_option("--max-components", eval.max_components,
                   "Evaluate only templates up to this many components (0 = no cap)")
      ->capture_default_str();
  eval_cmd->add_option("--predictor", eval.predictor, "Label for the report row")
      ->capture_default_str();
  eval_cmd->add_flag("--no-content", no_content, "Skip content-aware metrics");
  eval_cmd->add_flag("--svg", eval.svg, "Also write breakdowns.svg");
  eval_cmd->add_option("--seed", eval.seed, "Recorded in the report manifest")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitValidation;  // bad usage is a validation error
  }

  try {
    if (synth_cmd->parsed()) {
      synth.synth.profile = corpus::synth_profile_from_string(synth_profile);
      if (synth_out.empty()) {
        const auto dir = make_run_dir("synth");
        write_run_manifest(dir, "synth", {{"seed", synth.synth.seed},
                                          {"count", synth.synth.count},
                                          {"profile", synth_profile}});
        synth.out = dir / "corpus";
      } else {
        synth.out = synth_out;
      }
      return cli::cmd_synth(synth);
    }
    if (ingest_cmd->parsed()) {
      ingest.normalize.filter_mode = ingest_mode == "dims"
                                         ? corpus::FilterMode::per_dimension
                                         : corpus::FilterMode::area_fraction;
      ingest.out = ingest_out.empty() ? make_run_dir("ingest") / "corpus"
                                      : std::filesystem::path(ingest_out);
      return cli::cmd_ingest(ingest);
    }
    if (validate_cmd->parsed()) {
      return cli::cmd_validate(validate);
    }
    if (build_cmd->parsed()) {
      for (const std::string& task : build_tasks) {
        build.tasks.push_back(instruct::task_from_string(task));
      }
      build.out = build_out.empty() ? make_run_dir("build") : std::filesystem::path(build_out);
      return cli::cmd_build(build);
    }
    if (plan_cmd->parsed()) {
      plan.out_file = plan_out.empty() ? make_run_dir("plan") / "predictions.jsonl"
                                       : std::filesystem::path(plan_out);
      return cli::cmd_plan(plan);
    }
    if (baseline_cmd->parsed()) {
      baseline.endpoint.supports_images = !text_only;
      const auto dir = baseline_out.empty() ? make_run_dir("baseline") : std::filesystem::path();
      baseline.options.out_file =
          baseline_out.empty() ? dir / "predictions.jsonl" : std::filesystem::path(baseline_out);
      if (baseline.options.cache_dir.empty() && baseline_out.empty()) {
        baseline.options.cache_dir = dir / "cache";
      }
      if (baseline.transcript.empty() && baseline_out.empty()) {
        baseline.transcript = dir / "transcripts.jsonl";
      }
      return cli::cmd_baseline(baseline);
    }
    if (render_cmd->parsed()) {
      render.out_dir = render_out.empty() ? make_run_dir("render") / "previews"
                                          : std::filesystem::path(render_out);
      return cli::cmd_render(render);
    }
    if (eval_cmd->parsed()) {
      eval.content_metrics = !no_content;
      eval.out_dir = eval_out.empty() ? make_run_dir("eval") : std::filesystem::path(eval_out);
      return cli::cmd_eval(eval);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return 0;
}
