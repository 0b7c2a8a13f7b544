#include "layoutkit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "layoutkit/dsl.hpp"
#include "layoutkit/raster.hpp"
#include "layoutkit/version.hpp"

namespace layoutkit::cli {

namespace {

using nlohmann::json;

// Stable per-template seed component (FNV-1a 64).
std::uint64_t id_seed(const std::string& id) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : id) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string relative_ref(const std::filesystem::path& target,
                         const std::filesystem::path& base) {
  std::error_code ec;
  const std::filesystem::path rel = std::filesystem::relative(target, base, ec);
  if (ec || rel.empty()) return target.lexically_normal().generic_string();
  return rel.generic_string();
}

bool wants_task(const BuildArgs& args, instruct::TaskKind task) {
  if (args.tasks.empty()) return true;
  return std::find(args.tasks.begin(), args.tasks.end(), task) != args.tasks.end();
}

json placements_to_json(std::span<const Placement> placements) {
  json out = json::array();
  for (const Placement& p : placements) {
    out.push_back({{"left", p.left},
                   {"top", p.top},
                   {"width", p.width},
                   {"height", p.height},
                   {"layer", p.layer}});
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const NetworkError*>(&error) != nullptr) return kExitNetwork;
  if (dynamic_cast<const ValidationError*>(&error) != nullptr) return kExitValidation;
  return 1;
}

int cmd_ingest(const IngestArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw ValidationError("cannot open input: " + args.input.string());
  const std::filesystem::path input_dir =
      args.input.has_parent_path() ? args.input.parent_path() : ".";

  corpus::Corpus out_corpus;
  out_corpus.root = args.out;
  std::filesystem::create_directories(args.out);

  auto stage_asset = [&](const std::string& ref) {
    if (ref.empty()) return;
    const std::filesystem::path src = input_dir / ref;
    const std::filesystem::path dst = args.out / ref;
    if (!std::filesystem::exists(src)) {
      std::cerr << "warning: referenced asset not found: " << src.string() << "\n";
      return;
    }
    if (dst.has_parent_path()) std::filesystem::create_directories(dst.parent_path());
    std::filesystem::copy_file(src, dst, std::filesystem::copy_options::overwrite_existing);
  };

  std::string line;
  int line_no = 0;
  int skipped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      const std::string message = "line " + std::to_string(line_no) + ": invalid JSON";
      if (!args.skip_invalid) throw ValidationError(message);
      std::cerr << "warning: " << message << ", skipped\n";
      ++skipped;
      continue;
    }
    try {
      const corpus::RawTemplateRecord raw = corpus::raw_from_json(j);
      const Placement canvas_box{0, 0, static_cast<int>(std::max<std::int64_t>(1, raw.canvas_width)),
                                 static_cast<int>(std::max<std::int64_t>(1, raw.canvas_height)), 0};
      for (std::size_t k = 0; k < raw.elements.size(); ++k) {
        const corpus::RawElement& el = raw.elements[k];
        const Placement box{static_cast<int>(el.left), static_cast<int>(el.top),
                            static_cast<int>(el.width), static_cast<int>(el.height), 0};
        if (box_intersection_area(box, canvas_box) == 0) {
          throw ValidationError("record '" + raw.id + "': /elements/" + std::to_string(k) +
                                ": box does not intersect the canvas");
        }
      }
      corpus::CorpusEntry entry;
      entry.tpl = corpus::normalize(raw, args.normalize);
      entry.split = j.value("split", std::string("train"));
      for (const Component& c : entry.tpl.components) stage_asset(c.image);
      if (entry.tpl.canvas.background) stage_asset(*entry.tpl.canvas.background);
      if (entry.tpl.saliency) stage_asset(*entry.tpl.saliency);
      out_corpus.entries.push_back(std::move(entry));
    } catch (const corpus::EmptyTemplate& e) {
      std::cerr << "warning: " << e.what() << ", template skipped\n";
      ++skipped;
    } catch (const ValidationError& e) {
      if (!args.skip_invalid) throw;
      std::cerr << "warning: " << e.what() << ", skipped\n";
      ++skipped;
    }
  }

  if (out_corpus.entries.empty()) {
    throw ValidationError("no templates survived ingestion");
  }
  out_corpus.manifest.name = args.name;
  out_corpus.manifest.provenance = "ingested from " + args.input.filename().string();
  for (const corpus::CorpusEntry& entry : out_corpus.entries) {
    out_corpus.manifest.split_counts[entry.split] += 1;
  }
  corpus::save_corpus(out_corpus);
  std::cout << "ingested " << out_corpus.entries.size() << " template(s) into "
            << args.out.string();
  if (skipped > 0) std::cout << " (" << skipped << " skipped)";
  std::cout << "\n";
  return kExitOk;
}

int cmd_synth(const SynthArgs& args) {
  const corpus::Corpus corpus = corpus::generate_synthetic(args.out, args.synth);
  std::cout << "generated " << corpus.entries.size() << " template(s) under "
            << args.out.string() << "\n";
  return kExitOk;
}

BuildCounts build_instructions(const corpus::Corpus& corpus, const BuildArgs& args) {
  std::filesystem::create_directories(args.out);
  const std::filesystem::path out_abs = std::filesystem::absolute(args.out);
  const std::filesystem::path corpus_abs = std::filesystem::absolute(corpus.root);

  auto resolve = [&](const std::string& corpus_ref) {
    return relative_ref(corpus_abs / corpus_ref, out_abs);
  };

  std::vector<const Template*> selected;
  for (const corpus::CorpusEntry& entry : corpus.entries) {
    if (args.split != "all" && entry.split != args.split) continue;
    if (args.max_components > 0 &&
        static_cast<int>(entry.tpl.components.size()) > args.max_components) {
      continue;
    }
    selected.push_back(&entry.tpl);
  }

  const bool need_renders = wants_task(args, instruct::TaskKind::coordinates_predicting) ||
                            wants_task(args, instruct::TaskKind::layout_recovering);
  if (need_renders) std::filesystem::create_directories(args.out / "renders");

  std::ofstream coords_out, recover_out, plan_out;
  if (wants_task(args, instruct::TaskKind::coordinates_predicting)) {
    coords_out.open(args.out / "instructions_coordinates_predicting.jsonl", std::ios::trunc);
  }
  if (wants_task(args, instruct::TaskKind::layout_recovering)) {
    recover_out.open(args.out / "instructions_layout_recovering.jsonl", std::ios::trunc);
  }
  if (wants_task(args, instruct::TaskKind::layout_planning)) {
    plan_out.open(args.out / "instructions_layout_planning.jsonl", std::ios::trunc);
  }

  BuildCounts counts;
  for (const Template* tpl : selected) {
    if (!tpl->gold) {
      throw instruct::MissingGold("template " + tpl->id + " has no gold layout");
    }
    std::string render_ref;
    if (need_renders) {
      const std::filesystem::path render_path = args.out / "renders" / (tpl->id + ".png");
      const std::vector<std::uint8_t> png =
          raster::composite_preview_png(*tpl, *tpl->gold, corpus.root);
      img::write_file(render_path, png);
      render_ref = "renders/" + tpl->id + ".png";
    }

    auto rewrite = [&](instruct::InstructionExample example) {
      for (std::string& ref : example.images) {
        if (ref.rfind("renders/", 0) != 0) ref = resolve(ref);
      }
      return example;
    };

    if (coords_out.is_open()) {
      for (instruct::InstructionExample& ex :
           instruct::build_coordinates_predicting(*tpl, render_ref)) {
        coords_out << instruct::example_to_json(rewrite(std::move(ex))).dump() << '\n';
        ++counts.coordinates;
      }
    }
    if (recover_out.is_open()) {
      instruct::InstructionExample ex = instruct::build_layout_recovering(*tpl, render_ref);
      recover_out << instruct::example_to_json(rewrite(std::move(ex))).dump() << '\n';
      ++counts.recovering;
    }
    if (plan_out.is_open()) {
      instruct::InstructionExample ex = instruct::build_layout_planning(*tpl, true);
      plan_out << instruct::example_to_json(rewrite(std::move(ex))).dump() << '\n';
      ++counts.planning;
    }
  }
  return counts;
}

int cmd_build(const BuildArgs& args) {
  const corpus::Corpus corpus = corpus::load_corpus(args.corpus_dir);
  const BuildCounts counts = build_instructions(corpus, args);
  std::cout << "built " << counts.coordinates << " coordinates, " << counts.recovering
            << " recovering, " << counts.planning << " planning example(s) under "
            << args.out.string() << "\n";
  return kExitOk;
}

void plan_corpus(const corpus::Corpus& corpus, const PlanArgs& args) {
  planner::require_valid(args.config);
  if (args.mode != "auto" && args.mode != "blank" && args.mode != "poster") {
    throw ValidationError("unknown planner mode: " + args.mode);
  }
  if (args.out_file.has_parent_path()) {
    std::filesystem::create_directories(args.out_file.parent_path());
  }
  std::ofstream out(args.out_file, std::ios::trunc);
  if (!out) throw Error("cannot write predictions: " + args.out_file.string());

  for (const corpus::CorpusEntry& entry : corpus.entries) {
    if (args.split != "all" && entry.split != args.split) continue;
    const Template& tpl = entry.tpl;
    const bool poster_mode =
        args.mode == "poster" || (args.mode == "auto" && tpl.saliency.has_value());

    json line{{"template_id", tpl.id}};
    if (poster_mode) {
      if (!tpl.saliency) {
        throw ValidationError("template " + tpl.id + " has no saliency map for poster planning");
      }
      raster::SaliencyMap saliency;
      saliency.map = img::load_gray(corpus.root / *tpl.saliency);
      std::optional<img::GrayImage> background;
      if (tpl.canvas.background) {
        background = img::load_gray(corpus.root / *tpl.canvas.background);
      }
      // Per-template seed keeps runs reproducible template by template.
      planner::PlannerConfig config = args.config;
      config.seed = args.config.seed ^ id_seed(tpl.id);
      const planner::PosterPlan plan = planner::plan_poster(
          tpl, saliency, background ? &*background : nullptr, config);
      line["css_text"] = dsl::serialize(plan.placements);
      line["placements"] = placements_to_json(plan.placements);
      line["planner"] = "poster";
      line["objective"] = {{"occlusion", plan.objective.occlusion},
                           {"utility", plan.objective.utility},
                           {"unreadability", plan.objective.unreadability},
                           {"out_of_bounds", plan.objective.out_of_bounds},
                           {"overlap", plan.objective.overlap},
                           {"total", plan.objective.total}};
    } else {
      const std::vector<Placement> placements = planner::plan_blank(tpl, args.config);
      line["css_text"] = dsl::serialize(placements);
      line["placements"] = placements_to_json(placements);
      line["planner"] = "blank";
    }
    line["fallback"] = false;
    out << line.dump() << '\n';
  }
}

int cmd_plan(const PlanArgs& args) {
  const corpus::Corpus corpus = corpus::load_corpus(args.corpus_dir);
  plan_corpus(corpus, args);
  std::cout << "plans written to " << args.out_file.string() << "\n";
  return kExitOk;
}

int cmd_baseline(const BaselineArgs& args) {
  const corpus::Corpus corpus = corpus::load_corpus(args.corpus_dir);
  std::optional<llm::TranscriptLog> transcript;
  if (!args.transcript.empty()) transcript.emplace(args.transcript);
  llm::ChatClient client(args.endpoint, nullptr, transcript ? &*transcript : nullptr);
  const llm::BaselineStats stats = llm::run_baseline(corpus, client, args.options);

  // Run manifest, including the seeded demonstration choice.
  std::filesystem::path manifest_path = args.options.out_file;
  manifest_path.replace_extension(".manifest.json");
  {
    json manifest{
        {"corpus", corpus.manifest.name},
        {"model", args.endpoint.model},
        {"shots", args.options.shots},
        {"seed", args.options.seed},
        {"text_only", !args.endpoint.supports_images},
        {"max_components", args.options.max_components},
        {"templates", stats.templates},
        {"network_calls", stats.network},
        {"cached", stats.cached},
        {"failed", stats.failed},
        {"toolkit_version", std::string(kToolkitVersion)},
    };
    if (!stats.demo_template_id.empty()) manifest["demo_template_id"] = stats.demo_template_id;
    std::ofstream out(manifest_path, std::ios::trunc);
    out << manifest.dump(2) << '\n';
  }

  std::cout << "baseline over " << stats.templates << " template(s): " << stats.network
            << " network call(s), " << stats.cached << " cached, " << stats.failed
            << " failed\n";
  if (!stats.demo_template_id.empty()) {
    std::cout << "demonstration template: " << stats.demo_template_id << "\n";
  }
  return kExitOk;
}

int cmd_render(const RenderArgs& args) {
  if (args.scale < 1 || args.scale > 16) throw ValidationError("render scale must be in 1..16");
  const corpus::Corpus corpus = corpus::load_corpus(args.corpus_dir);
  const std::vector<report::PredictionRecord> predictions =
      report::load_predictions(args.predictions);
  std::map<std::string, const Template*> by_id;
  for (const corpus::CorpusEntry& entry : corpus.entries) by_id[entry.tpl.id] = &entry.tpl;

  std::filesystem::create_directories(args.out_dir);
  int rendered = 0;
  for (const report::PredictionRecord& pred : predictions) {
    auto it = by_id.find(pred.template_id);
    if (it == by_id.end()) {
      throw report::CorpusMismatch("prediction references unknown template '" +
                                   pred.template_id + "'");
    }
    const Template& tpl = *it->second;
    if (!tpl.gold) continue;
    const img::RgbaImage gold_img = raster::composite(tpl, *tpl.gold, corpus.root);
    const img::RgbaImage pred_img = raster::composite(tpl, pred.placements, corpus.root);

    const int gutter = 4;
    img::RgbaImage panel = img::RgbaImage::filled(
        gold_img.width * 2 + gutter, std::max(gold_img.height, pred_img.height), 230, 230, 230);
    for (int y = 0; y < gold_img.height; ++y) {
      for (int x = 0; x < gold_img.width; ++x) {
        std::copy_n(gold_img.at(x, y), 4, panel.at(x, y));
      }
    }
    for (int y = 0; y < pred_img.height; ++y) {
      for (int x = 0; x < pred_img.width; ++x) {
        std::copy_n(pred_img.at(x, y), 4, panel.at(gold_img.width + gutter + x, y));
      }
    }
    const img::RgbaImage scaled = raster::scale_image(
        panel, panel.width * args.scale, panel.height * args.scale, raster::ScaleFilter::nearest);
    img::save_png(args.out_dir / (pred.template_id + ".png"), scaled);
    ++rendered;
  }
  std::cout << "rendered " << rendered << " preview(s) under " << args.out_dir.string() << "\n";
  return kExitOk;
}

report::EvalReport run_eval(const corpus::Corpus& corpus, const EvalArgs& args) {
  const std::vector<report::PredictionRecord> predictions =
      report::load_predictions(args.predictions);
  report::EvalOptions options;
  options.split = args.split;
  options.max_components = args.max_components;
  options.content_metrics = args.content_metrics;
  options.manifest.corpus = corpus.manifest.name;
  options.manifest.predictor = args.predictor;
  options.manifest.flags = args.flags.is_null()
                               ? json{{"split", args.split},
                                      {"max_components", args.max_components},
                                      {"content_metrics", args.content_metrics}}
                               : args.flags;
  options.manifest.seed = args.seed;
  options.manifest.toolkit_version = std::string(kToolkitVersion);
  return report::evaluate(corpus, predictions, options);
}

int cmd_eval(const EvalArgs& args) {
  const corpus::Corpus corpus = corpus::load_corpus(args.corpus_dir);
  const report::EvalReport result = run_eval(corpus, args);

  std::filesystem::create_directories(args.out_dir);
  {
    std::ofstream out(args.out_dir / "report.json", std::ios::trunc);
    out << report::report_to_json(result).dump(2) << '\n';
  }
  const std::string markdown = report::render_markdown(result);
  {
    std::ofstream out(args.out_dir / "report.md", std::ios::trunc);
    out << markdown;
  }
  if (args.svg) {
    std::ofstream out(args.out_dir / "breakdowns.svg", std::ios::trunc);
    out << report::render_breakdown_svg(result);
  }
  std::cout << markdown;
  return kExitOk;
}

int cmd_validate(const ValidateArgs& args) {
  const auto result = corpus::validate_corpus(args.corpus_dir);
  if (std::holds_alternative<corpus::CorpusManifest>(result)) {
    const corpus::CorpusManifest& manifest = std::get<corpus::CorpusManifest>(result);
    std::cout << "corpus '" << manifest.name << "' is valid";
    for (const auto& [split, count] : manifest.split_counts) {
      std::cout << " · " << split << ": " << count;
    }
    std::cout << "\n";
    return kExitOk;
  }
  const auto& violations = std::get<std::vector<corpus::SchemaViolation>>(result);
  for (const corpus::SchemaViolation& v : violations) {
    std::cerr << (v.record_id.empty() ? std::string("<corpus>") : v.record_id) << v.pointer
              << ": " << v.message << "\n";
  }
  throw ValidationError(std::to_string(violations.size()) + " schema violation(s)");
}

}  // namespace layoutkit::cli
