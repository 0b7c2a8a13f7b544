// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "layoutkit/cli.hpp"
#include "layoutkit/dsl.hpp"
#include "layoutkit/llm.hpp"
#include "layoutkit/metrics.hpp"
#include "layoutkit/planner.hpp"
#include "layoutkit/raster.hpp"
#include "layoutkit/rng.hpp"
#include "layoutkit/sha256.hpp"

#ifndef LAYOUTKIT_TEST_DATA_DIR
#define LAYOUTKIT_TEST_DATA_DIR "tests/data"
#endif

namespace {

using namespace layoutkit;
using nlohmann::json;
namespace fs = std::filesystem;

struct Check {
  std::string detail;
  bool ok = true;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
  void note(const std::string& text) {
    if (detail.empty()) detail = text;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("layoutkit_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tree_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string combined;
  for (const fs::path& f : files) {
    combined += fs::relative(f, root).generic_string();
    combined += ':';
    combined += sha256_hex(img::read_file(f));
    combined += '\n';
  }
  return sha256_hex(combined);
}

std::vector<Placement> random_layout(Rng& rng, int n) {
  std::vector<Placement> layout;
  for (int k = 0; k < n; ++k) {
    Placement p;
    p.left = rng.range(-20, 140);
    p.top = rng.range(-20, 140);
    p.width = rng.range(1, 140);
    p.height = rng.range(1, 140);
    p.layer = k * 2 + rng.below(2);  // distinct: parities separated by stride 2
    layout.push_back(p);
  }
  // Stride-2 slots can still collide via the random parity; force distinct.
  std::set<int> used;
  for (Placement& p : layout) {
    while (used.count(p.layer) > 0) ++p.layer;
    used.insert(p.layer);
  }
  return layout;
}

// --- criterion 1 -----------------------------------------------------------

Check dsl_round_trip() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(0xACC1);
  for (int trial = 0; trial < 1000 && check.ok; ++trial) {
    const std::vector<Placement> layout = random_layout(rng, rng.range(0, 8));
    std::vector<Placement> back;
    try {
      back = dsl::parse_strict(dsl::serialize(layout));
    } catch (const std::exception& e) {
      check.expect(false, std::string("round-trip threw: ") + e.what());
      break;
    }
    check.expect(back == layout, "round-trip mismatch at trial " + std::to_string(trial));
  }

  const Canvas canvas{128, 96, "poster", std::nullopt};
  for (int trial = 0; trial < 10000 && check.ok; ++trial) {
    const int len = rng.below(280);
    std::string text;
    for (int i = 0; i < len; ++i) {
      const int roll = rng.below(100);
      if (roll < 60) {
        text.push_back(static_cast<char>(rng.below(256)));
      } else {
        static constexpr const char* kBits[] = {"component_", "{", "}", ":", ";", "px",
                                                "left", "top", "width", "height", "layer",
                                                "[", "]", "\"", ",", "7", "0.25", "\n", "-"};
        text += kBits[rng.below(static_cast<int>(std::size(kBits)))];
      }
    }
    const int n = rng.range(1, 6);
    try {
      const dsl::LenientResult result = dsl::parse_lenient(text, n, canvas);
      check.expect(result.placements.size() == static_cast<std::size_t>(n),
                   "lenient returned wrong count at trial " + std::to_string(trial));
    } catch (const std::exception& e) {
      check.expect(false, std::string("lenient parse aborted: ") + e.what());
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s exceeds 5 s");
  check.note("1000 round-trips + 10000 fuzz inputs in " + std::to_string(elapsed) + " s");
  return check;
}

// --- criterion 2 -----------------------------------------------------------

Check geometry_oracle() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(0xACC2);
  for (int trial = 0; trial < 500 && check.ok; ++trial) {
    Placement a, b;
    auto box = [&](Placement& p) {
      p.width = rng.range(1, 128);
      p.height = rng.range(1, 128);
      p.left = rng.range(-16, 128 - 1);
      p.top = rng.range(-16, 128 - 1);
    };
    box(a);
    box(b);
    // Pixel-count oracle over the joint bounding region.
    std::int64_t inter = 0, in_a = 0, in_b = 0;
    const int x0 = std::min(a.left, b.left), x1 = std::max(a.left + a.width, b.left + b.width);
    const int y0 = std::min(a.top, b.top), y1 = std::max(a.top + a.height, b.top + b.height);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const bool pa = x >= a.left && x < a.left + a.width && y >= a.top && y < a.top + a.height;
        const bool pb = x >= b.left && x < b.left + b.width && y >= b.top && y < b.top + b.height;
        inter += pa && pb;
        in_a += pa;
        in_b += pb;
      }
    }
    const double oracle_iou = static_cast<double>(inter) / static_cast<double>(in_a + in_b - inter);
    check.expect(box_intersection_area(a, b) == inter,
                 "intersection mismatch at trial " + std::to_string(trial));
    check.expect(iou(a, b) == oracle_iou, "iou mismatch at trial " + std::to_string(trial));
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s exceeds 5 s");
  check.note("500 analytic-vs-rasterized box pairs, exact, in " + std::to_string(elapsed) + " s");
  return check;
}

// --- criterion 3 -----------------------------------------------------------

Check builder_counts() {
  Check check;
  const fs::path dir = work_dir("builders");
  corpus::SynthOptions options;
  options.seed = 2024;
  options.count = 200;
  const corpus::Corpus corpus = corpus::generate_synthetic(dir / "corpus", options);

  std::int64_t component_sum = 0;
  for (const corpus::CorpusEntry& entry : corpus.entries) {
    component_sum += static_cast<std::int64_t>(entry.tpl.components.size());
  }

  cli::BuildArgs build;
  build.corpus_dir = dir / "corpus";
  build.out = dir / "instructions";
  const cli::BuildCounts counts = cli::build_instructions(corpus, build);

  check.expect(counts.coordinates == component_sum,
               "coordinates " + std::to_string(counts.coordinates) + " != sum n_i " +
                   std::to_string(component_sum));
  check.expect(counts.recovering == 200, "recovering != 200");
  check.expect(counts.planning == 200, "planning != 200");

  auto line_count = [](const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::int64_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
  };
  check.expect(line_count(dir / "instructions" / "instructions_coordinates_predicting.jsonl") ==
                   component_sum,
               "coordinates file line count mismatch");
  check.expect(
      line_count(dir / "instructions" / "instructions_layout_recovering.jsonl") == 200,
      "recovering file line count mismatch");
  check.expect(line_count(dir / "instructions" / "instructions_layout_planning.jsonl") == 200,
               "planning file line count mismatch");
  check.note("coordinates " + std::to_string(counts.coordinates) + " = sum n_i, recovering = planning = 200");
  fs::remove_all(dir);
  return check;
}

// --- criterion 4 -----------------------------------------------------------

Check quantized_oracle() {
  Check check;
  Rng rng(0xACC4);
  auto oracle_bin = [](int value, int extent, int bins) {
    const std::int64_t v = std::clamp<std::int64_t>(value, 0, extent);
    for (int b = 0; b < bins; ++b) {
      if (v * bins < static_cast<std::int64_t>(b + 1) * extent) return b;
    }
    return bins - 1;
  };
  for (int trial = 0; trial < 10000 && check.ok; ++trial) {
    const int extent = rng.range(1, 512);
    const int bins = rng.range(1, 128);
    const int pred = rng.range(-20, extent + 20);
    const int gold = rng.range(-20, extent + 20);
    const int expected =
        oracle_bin(pred, extent, bins) == oracle_bin(gold, extent, bins) ? 1 : 0;
    check.expect(metrics::quantized_accuracy(pred, gold, extent, bins) == expected,
                 "quantized_accuracy mismatch at trial " + std::to_string(trial));
  }
  check.expect(metrics::quantize_bin(128, 128, 64) == 63, "boundary 128 must land in bin 63");
  check.note("10000 random triples equal brute-force binning; boundary -> bin 63");
  return check;
}

// --- criterion 5 -----------------------------------------------------------

Check content_fixtures() {
  Check check;

  // Half-covered fully-salient canvas.
  {
    const Canvas canvas{100, 80, "poster", std::nullopt};
    raster::SaliencyMap salient{img::GrayImage::filled(100, 80, 255), 128};
    const std::vector<Placement> half = {{0, 0, 50, 80, 0}};
    check.expect(std::abs(raster::occlusion_rate(half, salient, canvas) - 0.5) <= 1e-9,
                 "occlusion on half-covered salient canvas != 0.5");
  }

  // Left half salient, element exactly on the right half.
  {
    const Canvas canvas{128, 128, "poster", std::nullopt};
    raster::SaliencyMap left{img::GrayImage::filled(128, 128, 0), 128};
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 64; ++x) left.map.at(x, y) = 255;
    }
    const std::vector<Placement> right = {{64, 0, 64, 128, 0}};
    check.expect(std::abs(raster::utility_rate(right, left, canvas) - 1.0) <= 1e-9,
                 "utility of right-half element != 1.0");
    check.expect(std::abs(raster::occlusion_rate(right, left, canvas)) <= 1e-9,
                 "occlusion of right-half element != 0.0");
  }

  // Uniform background scores zero unreadability.
  {
    const Canvas canvas{100, 80, "poster", std::nullopt};
    const img::GrayImage uniform = img::GrayImage::filled(100, 80, 200);
    const std::vector<Placement> layout = {{10, 10, 50, 40, 0}};
    const std::vector<ComponentKind> kinds = {ComponentKind::text};
    check.expect(raster::unreadability(layout, kinds, uniform, canvas) == 0.0,
                 "uniform background must score exactly 0");
  }

  // Step-edge fixture against an independent convolution.
  {
    const Canvas canvas{128, 128, "poster", std::nullopt};
    img::GrayImage bg = img::GrayImage::filled(128, 128, 0);
    for (int y = 0; y < 128; ++y) {
      for (int x = 64; x < 128; ++x) bg.at(x, y) = 255;
    }
    const Placement box{60, 20, 8, 30, 0};
    auto sample = [&](int x, int y) {
      return static_cast<double>(bg.at(std::clamp(x, 0, 127), std::clamp(y, 0, 127)));
    };
    double sum = 0.0;
    for (int y = box.top; y < box.top + box.height; ++y) {
      for (int x = box.left; x < box.left + box.width; ++x) {
        const double gx = -sample(x - 1, y - 1) - 2 * sample(x - 1, y) - sample(x - 1, y + 1) +
                          sample(x + 1, y - 1) + 2 * sample(x + 1, y) + sample(x + 1, y + 1);
        const double gy = -sample(x - 1, y - 1) - 2 * sample(x, y - 1) - sample(x + 1, y - 1) +
                          sample(x - 1, y + 1) + 2 * sample(x, y + 1) + sample(x + 1, y + 1);
        sum += std::sqrt(gx * gx + gy * gy);
      }
    }
    const double oracle = sum / (box.width * box.height) / 1020.0 * 100.0;
    const std::vector<Placement> layout = {box};
    const std::vector<ComponentKind> kinds = {ComponentKind::text};
    const double got = raster::unreadability(layout, kinds, bg, canvas);
    check.expect(std::abs(got - oracle) <= 1e-6,
                 "step-edge fixture off by " + std::to_string(std::abs(got - oracle)));
  }
  check.note("occlusion/utility pixel oracles, uniform-zero, and convolution fixture hold");
  return check;
}

// --- criterion 6 -----------------------------------------------------------

Check repair_fixtures() {
  Check check;
  const fs::path dir = fs::path(LAYOUTKIT_TEST_DATA_DIR) / "repair_fixtures";
  std::ifstream cases_in(dir / "cases.json");
  check.expect(static_cast<bool>(cases_in), "cannot open repair fixtures");
  if (!check.ok) return check;
  json cases;
  cases_in >> cases;
  check.expect(cases.is_array() && cases.size() >= 10,
               "need at least 10 checked-in repair fixtures");
  int verified = 0;
  for (const json& c : cases) {
    const std::string name = c["name"].get<std::string>();
    std::ifstream in(dir / (name + ".txt"), std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    const int n = c["n"].get<int>();
    const Canvas canvas{c["canvas"][0].get<int>(), c["canvas"][1].get<int>(), "poster",
                        std::nullopt};
    const dsl::LenientResult first = dsl::parse_lenient(text, n, canvas);
    const dsl::LenientResult second = dsl::parse_lenient(text, n, canvas);
    check.expect(first.placements.size() == static_cast<std::size_t>(n),
                 name + ": expected " + std::to_string(n) + " placements");
    for (int k = 0; k < n && check.ok; ++k) {
      const json& e = c["expected"][static_cast<std::size_t>(k)];
      const Placement want{e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>(),
                           e[4].get<int>()};
      check.expect(first.placements[static_cast<std::size_t>(k)] == want,
                   name + ": placement " + std::to_string(k) + " mismatch");
    }
    check.expect(!first.diagnostics.canonical(), name + ": diagnostics must be non-empty");
    if (auto it = c.find("expects"); it != c.end()) {
      for (const json& expect : *it) {
        const std::string selector = expect[0].get<std::string>();
        const std::string property = expect[1].get<std::string>();
        const std::string action_part = expect[2].get<std::string>();
        const bool found = std::any_of(
            first.diagnostics.repaired.begin(), first.diagnostics.repaired.end(),
            [&](const dsl::RepairRecord& r) {
              return r.selector == selector && r.property == property &&
                     r.action.find(action_part) != std::string::npos;
            });
        check.expect(found, name + ": missing documented repair '" + action_part + "'");
      }
    }
    check.expect(second.placements == first.placements &&
                     second.diagnostics.repaired == first.diagnostics.repaired &&
                     second.diagnostics.dropped_text == first.diagnostics.dropped_text,
                 name + ": parse is not byte-stable");
    ++verified;
  }
  check.note(std::to_string(verified) + " malformed outputs recovered with documented diagnostics");
  return check;
}

// --- criterion 7 -----------------------------------------------------------

Check planner_efficacy() {
  Check check;
  const fs::path dir = work_dir("planner");
  corpus::SynthOptions options;
  options.seed = 4242;
  options.count = 20;
  options.profile = corpus::SynthProfile::poster_background;
  const corpus::Corpus corpus = corpus::generate_synthetic(dir / "corpus", options);

  int wins = 0;
  double slowest = 0.0;
  std::vector<double> annealed_occ, random_occ;
  planner::PlannerConfig config;
  config.iterations = 5000;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const Template& tpl = corpus.entries[i].tpl;
    raster::SaliencyMap saliency;
    saliency.map = img::load_gray(dir / "corpus" / *tpl.saliency);
    const img::GrayImage background = img::load_gray(dir / "corpus" / *tpl.canvas.background);
    std::vector<ComponentKind> kinds;
    for (const Component& c : tpl.components) kinds.push_back(c.kind);
    const std::vector<double> gradient = raster::sobel_magnitude(background);

    planner::PlannerConfig seeded = config;
    seeded.seed = 1000 + i;

    const auto start = std::chrono::steady_clock::now();
    const planner::PosterPlan plan =
        planner::plan_poster(tpl, saliency, &background, seeded);
    slowest = std::max(slowest, seconds_since(start));

    const std::vector<Placement> random_layout = planner::plan_random(tpl, seeded);
    const planner::ObjectiveBreakdown random_obj = planner::evaluate_objective(
        random_layout, kinds, &saliency, &gradient, tpl.canvas, seeded);

    if (plan.objective.total <= random_obj.total) ++wins;
    annealed_occ.push_back(plan.objective.occlusion);
    random_occ.push_back(random_obj.occlusion);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double annealed_median = median(annealed_occ);
  const double random_median = median(random_occ);
  check.expect(wins >= 16, "annealer won only " + std::to_string(wins) + "/20 on total objective");
  check.expect(annealed_median <= random_median,
               "median occlusion " + std::to_string(annealed_median) + " not <= random " +
                   std::to_string(random_median));
  check.expect(slowest <= 5.0, "slowest poster took " + std::to_string(slowest) + " s");
  check.note("won " + std::to_string(wins) + "/20, median occ " +
             metrics::format_pct(annealed_median * 100) + " vs random " +
             metrics::format_pct(random_median * 100) + ", slowest poster " +
             std::to_string(slowest) + " s");
  fs::remove_all(dir);
  return check;
}

// --- criterion 8 -----------------------------------------------------------

Check end_to_end() {
  Check check;
  const fs::path dir_a = work_dir("e2e_a");
  const fs::path dir_b = work_dir("e2e_b");

  auto pipeline = [](const fs::path& dir) {
    cli::SynthArgs synth;
    synth.out = dir / "corpus";
    synth.synth.seed = 808;
    synth.synth.count = 1000;
    cli::cmd_synth(synth);

    const corpus::Corpus corpus = corpus::load_corpus(dir / "corpus");
    cli::BuildArgs build;
    build.corpus_dir = dir / "corpus";
    build.out = dir / "instructions";
    cli::build_instructions(corpus, build);

    cli::PlanArgs plan;
    plan.corpus_dir = dir / "corpus";
    plan.out_file = dir / "predictions.jsonl";
    plan.config.seed = 5;
    cli::plan_corpus(corpus, plan);

    cli::EvalArgs eval;
    eval.corpus_dir = dir / "corpus";
    eval.predictions = dir / "predictions.jsonl";
    eval.out_dir = dir / "eval";
    eval.predictor = "planner:blank";
    const report::EvalReport result = cli::run_eval(corpus, eval);
    fs::create_directories(dir / "eval");
    std::ofstream out(dir / "eval" / "report.json", std::ios::trunc);
    out << report::report_to_json(result).dump(2) << '\n';
    return corpus;
  };

  const auto start = std::chrono::steady_clock::now();
  const corpus::Corpus corpus = pipeline(dir_a);
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 60.0,
               "pipeline took " + std::to_string(elapsed) + " s, budget is 60 s");

  pipeline(dir_b);
  check.expect(tree_digest(dir_a) == tree_digest(dir_b), "rerun is not hash-identical");

  // Gold fed back as predictions scores a perfect report.
  const fs::path gold_file = dir_a / "gold_predictions.jsonl";
  {
    std::ofstream out(gold_file, std::ios::trunc);
    for (const corpus::CorpusEntry& entry : corpus.entries) {
      if (entry.split != "val") continue;
      json placements = json::array();
      for (const Placement& p : *entry.tpl.gold) {
        placements.push_back({{"left", p.left},
                              {"top", p.top},
                              {"width", p.width},
                              {"height", p.height},
                              {"layer", p.layer}});
      }
      out << json{{"template_id", entry.tpl.id}, {"placements", placements}}.dump() << '\n';
    }
  }
  cli::EvalArgs eval;
  eval.corpus_dir = dir_a / "corpus";
  eval.predictions = gold_file;
  eval.out_dir = dir_a / "gold_eval";
  eval.predictor = "gold";
  const report::EvalReport gold_report = cli::run_eval(corpus, eval);
  check.expect(gold_report.geo_macro.miou == 100.0 && gold_report.geo_macro.left == 100.0 &&
                   gold_report.geo_macro.top == 100.0 && gold_report.geo_macro.width == 100.0 &&
                   gold_report.geo_macro.height == 100.0,
               "gold-as-prediction eval is not a perfect 100.00 row");
  check.note("1000-template pipeline in " + std::to_string(elapsed) +
             " s, rerun hash-identical, gold eval 100.00 across");
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  return check;
}

// --- criterion 9 -----------------------------------------------------------

Check baseline_plumbing() {
  Check check;
  const fs::path dir = work_dir("baseline");

  corpus::SynthOptions synth;
  synth.seed = 31;
  synth.count = 12;
  synth.profile = corpus::SynthProfile::poster_background;
  const corpus::Corpus corpus = corpus::generate_synthetic(dir / "corpus", synth);

  std::atomic<int> hits{0};
  std::atomic<int> holdback_429{2};
  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    if (holdback_429.fetch_sub(1) > 0) {
      res.status = 429;
      res.set_content("{\"error\":\"slow down\"}", "application/json");
      return;
    }
    const json body = json::parse(req.body);
    std::string text;
    for (const json& message : body.at("messages")) {
      const json& content = message.at("content");
      if (content.is_string()) {
        text += content.get<std::string>();
      } else {
        for (const json& part : content) {
          if (part.value("type", "") == "text") text += part.value("text", "");
        }
      }
    }
    int n = 1;
    if (const std::size_t pos = text.rfind("Arrange the "); pos != std::string::npos) {
      n = std::atoi(text.c_str() + pos + 12);
    }
    std::vector<Placement> layout;
    for (int k = 0; k < std::max(1, n); ++k) {
      layout.push_back(Placement{2 + 5 * k, 2 + 3 * k, 30, 20, k});
    }
    const json reply{{"choices", json::array({json{{"message",
                                                    {{"role", "assistant"},
                                                     {"content", dsl::serialize(layout)}}}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  llm::EndpointConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port);
  config.model = "mock-chat";
  config.auth_env = "";
  config.supports_images = false;  // caption protocol keeps requests text-only
  config.max_images = 4;

  // Pre-flight image cap, before any network traffic.
  {
    llm::EndpointConfig vision = config;
    vision.supports_images = true;
    llm::ChatClient client(vision);
    instruct::PromptPayload payload;
    payload.messages.push_back({"system", "s", {}});
    payload.messages.push_back({"user",
                                "<image_1><image_2><image_3><image_4><image_5>",
                                {"a", "b", "c", "d", "e"}});
    bool threw = false;
    try {
      client.complete(payload);
    } catch (const llm::TooManyImages&) {
      threw = true;
    }
    check.expect(threw, "5-image payload must fail pre-flight with a 4-image cap");
    check.expect(hits.load() == 0, "pre-flight rejection must not reach the endpoint");
  }

  // 429-retry path, then a full baseline run with cold and warm caches.
  llm::VirtualClock clock;
  llm::TranscriptLog transcript(dir / "transcript.jsonl");
  llm::BaselineOptions options;
  options.shots = 1;
  options.seed = 77;
  options.cache_dir = dir / "cache";
  options.out_file = dir / "predictions.jsonl";

  const int val_count = static_cast<int>(corpus.split("val").size());
  {
    llm::ChatClient client(config, &clock, &transcript);
    const llm::BaselineStats stats = llm::run_baseline(corpus, client, options);
    check.expect(stats.templates == val_count, "baseline did not cover the validation split");
    check.expect(stats.failed == 0, "baseline run had failures");
    check.expect(client.network_calls() == val_count + 2,
                 "expected two 429 retries plus one call per template");
    check.expect(!clock.sleeps.empty() && clock.sleeps[0] == 500,
                 "429 retry must back off before the second attempt");
  }
  {
    llm::ChatClient client(config, &clock, &transcript);
    const llm::BaselineStats stats = llm::run_baseline(corpus, client, options);
    check.expect(client.network_calls() == 0, "warm cache rerun must make zero network calls");
    check.expect(stats.cached == val_count, "warm rerun must be served from the cache");
  }

  server.stop();
  server_thread.join();

  // The emitted report renders both table shapes.
  cli::EvalArgs eval;
  eval.corpus_dir = dir / "corpus";
  eval.predictions = options.out_file;
  eval.out_dir = dir / "eval";
  eval.predictor = "mock-chat 1-shot";
  const report::EvalReport result = cli::run_eval(corpus, eval);
  const std::string markdown = report::render_markdown(result);
  check.expect(markdown.find("| Model | mIoU | Left | Top | Width | Height |") !=
                   std::string::npos,
               "geometric table row missing from the report");
  check.expect(markdown.find("| Model | Occ. ↓ | Uti. ↑ | Rea. ↓ |") != std::string::npos,
               "content-aware table row missing from the report");
  check.note("cap pre-flight, 429 retry, warm cache (0 calls), both report tables rendered");
  fs::remove_all(dir);
  return check;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const Criterion criteria[] = {
      {"1. DSL round-trip & lenient totality", dsl_round_trip},
      {"2. Geometry oracle equivalence", geometry_oracle},
      {"3. Builder counts", builder_counts},
      {"4. Quantized accuracy oracle", quantized_oracle},
      {"5. Content-aware fixtures", content_fixtures},
      {"6. Repair fixtures", repair_fixtures},
      {"7. Planner efficacy", planner_efficacy},
      {"8. End-to-end determinism & speed", end_to_end},
      {"9. Baseline plumbing", baseline_plumbing},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s%s%s\n", check.ok ? "PASS" : "FAIL", criterion.name,
                check.detail.empty() ? "" : " — ", check.detail.c_str());
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 9 acceptance criteria passed\n");
  return 0;
}
