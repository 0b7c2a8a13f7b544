#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "layoutkit/cli.hpp"
#include "layoutkit/corpus.hpp"
#include "layoutkit/dsl.hpp"
#include "layoutkit/geometry.hpp"
#include "layoutkit/metrics.hpp"
#include "layoutkit/planner.hpp"
#include "layoutkit/raster.hpp"
#include "layoutkit/report.hpp"
#include "layoutkit/version.hpp"

namespace py = pybind11;
using namespace layoutkit;

namespace {

py::dict diagnostics_to_dict(const dsl::ParseDiagnostics& diag) {
  py::list repaired;
  for (const dsl::RepairRecord& r : diag.repaired) {
    repaired.append(py::make_tuple(r.selector, r.property, r.action));
  }
  py::dict out;
  out["repaired"] = repaired;
  out["dropped_text"] = diag.dropped_text;
  out["canonical"] = diag.canonical();
  return out;
}

raster::SaliencyMap load_saliency(const std::filesystem::path& path, int threshold) {
  raster::SaliencyMap map;
  map.map = img::load_gray(path);
  map.threshold = static_cast<std::uint8_t>(threshold);
  return map;
}

}  // namespace

PYBIND11_MODULE(_layoutkit, m) {
  m.doc() = "Layout planning toolkit: layout DSL, corpora, metrics, planners";
  m.attr("__version__") = std::string(kToolkitVersion);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::enum_<ComponentKind>(m, "ComponentKind")
      .value("image", ComponentKind::image)
      .value("text", ComponentKind::text)
      .value("logo", ComponentKind::logo)
      .value("decoration", ComponentKind::decoration)
      .value("other", ComponentKind::other);

  py::class_<Placement>(m, "Placement")
      .def(py::init<>())
      .def(py::init([](int left, int top, int width, int height, int layer) {
             return Placement{left, top, width, height, layer};
           }),
           py::arg("left"), py::arg("top"), py::arg("width"), py::arg("height"),
           py::arg("layer") = 0)
      .def_readwrite("left", &Placement::left)
      .def_readwrite("top", &Placement::top)
      .def_readwrite("width", &Placement::width)
      .def_readwrite("height", &Placement::height)
      .def_readwrite("layer", &Placement::layer)
      .def("__eq__", [](const Placement& a, const Placement& b) { return a == b; })
      .def("__repr__", [](const Placement& p) {
        return "Placement(left=" + std::to_string(p.left) + ", top=" + std::to_string(p.top) +
               ", width=" + std::to_string(p.width) + ", height=" + std::to_string(p.height) +
               ", layer=" + std::to_string(p.layer) + ")";
      });

  py::class_<Canvas>(m, "Canvas")
      .def(py::init([](int width, int height, const std::string& scenario,
                       std::optional<std::string> background) {
             return Canvas{width, height, scenario, std::move(background)};
           }),
           py::arg("width"), py::arg("height"), py::arg("scenario") = "poster",
           py::arg("background") = std::nullopt)
      .def_readwrite("width", &Canvas::width)
      .def_readwrite("height", &Canvas::height)
      .def_readwrite("scenario", &Canvas::scenario)
      .def_readwrite("background", &Canvas::background);

  py::class_<Component>(m, "Component")
      .def(py::init<>())
      .def(py::init([](std::string id, int index, std::string image, ComponentKind kind,
                       std::optional<std::string> caption, int natural_width,
                       int natural_height) {
             return Component{std::move(id), index,        std::move(image), kind,
                              std::move(caption), natural_width, natural_height};
           }),
           py::arg("id"), py::arg("index"), py::arg("image") = "", py::arg("kind") = ComponentKind::image,
           py::arg("caption") = std::nullopt, py::arg("natural_width") = 1,
           py::arg("natural_height") = 1)
      .def_readwrite("id", &Component::id)
      .def_readwrite("index", &Component::index)
      .def_readwrite("image", &Component::image)
      .def_readwrite("kind", &Component::kind)
      .def_readwrite("caption", &Component::caption)
      .def_readwrite("natural_width", &Component::natural_width)
      .def_readwrite("natural_height", &Component::natural_height);

  py::class_<Template>(m, "Template")
      .def(py::init<>())
      .def_readwrite("id", &Template::id)
      .def_readwrite("canvas", &Template::canvas)
      .def_readwrite("components", &Template::components)
      .def_readwrite("gold", &Template::gold)
      .def_readwrite("saliency", &Template::saliency);

  // geometry
  m.def("box_intersection_area", &box_intersection_area, py::arg("a"), py::arg("b"));
  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("clamp_to_canvas", &clamp_to_canvas, py::arg("placement"), py::arg("canvas"));

  // layout DSL
  m.def(
      "serialize",
      [](const std::vector<Placement>& layout) { return dsl::serialize(layout); },
      py::arg("layout"));
  m.def("parse_strict", [](const std::string& text) { return dsl::parse_strict(text); },
        py::arg("text"));
  m.def(
      "parse_lenient",
      [](const std::string& text, int n_components, const Canvas& canvas, bool allow_fallback) {
        const dsl::LenientResult result =
            dsl::parse_lenient(text, n_components, canvas, {allow_fallback});
        return py::make_tuple(result.placements, diagnostics_to_dict(result.diagnostics));
      },
      py::arg("text"), py::arg("n_components"), py::arg("canvas"),
      py::arg("allow_fallback") = true);

  // metrics
  m.def(
      "miou",
      [](const std::vector<Placement>& pred, const std::vector<Placement>& gold) {
        return metrics::miou(pred, gold);
      },
      py::arg("pred"), py::arg("gold"));
  m.def("quantized_accuracy", &metrics::quantized_accuracy, py::arg("pred_value"),
        py::arg("gold_value"), py::arg("axis_extent"), py::arg("bins") = metrics::kDefaultBins);

  // content-aware metrics over saliency/background files
  m.def(
      "occlusion_rate",
      [](const std::vector<Placement>& layout, const std::filesystem::path& saliency,
         const Canvas& canvas, int threshold) {
        return raster::occlusion_rate(layout, load_saliency(saliency, threshold), canvas);
      },
      py::arg("layout"), py::arg("saliency_path"), py::arg("canvas"), py::arg("threshold") = 128);
  m.def(
      "utility_rate",
      [](const std::vector<Placement>& layout, const std::filesystem::path& saliency,
         const Canvas& canvas, int threshold) {
        return raster::utility_rate(layout, load_saliency(saliency, threshold), canvas);
      },
      py::arg("layout"), py::arg("saliency_path"), py::arg("canvas"), py::arg("threshold") = 128);
  m.def(
      "unreadability",
      [](const std::vector<Placement>& layout, const std::vector<ComponentKind>& kinds,
         const std::filesystem::path& background, const Canvas& canvas) {
        return raster::unreadability(layout, kinds, img::load_gray(background), canvas);
      },
      py::arg("layout"), py::arg("kinds"), py::arg("background_path"), py::arg("canvas"));

  // planners
  py::class_<planner::PlannerConfig>(m, "PlannerConfig")
      .def(py::init<>())
      .def_readwrite("seed", &planner::PlannerConfig::seed)
      .def_readwrite("iterations", &planner::PlannerConfig::iterations)
      .def_readwrite("initial_temperature", &planner::PlannerConfig::initial_temperature)
      .def_readwrite("cooling", &planner::PlannerConfig::cooling)
      .def_readwrite("w_occ", &planner::PlannerConfig::w_occ)
      .def_readwrite("w_uti", &planner::PlannerConfig::w_uti)
      .def_readwrite("w_rea", &planner::PlannerConfig::w_rea);

  m.def("plan_blank", &planner::plan_blank, py::arg("template"),
        py::arg("config") = planner::PlannerConfig{});
  m.def(
      "plan_poster",
      [](const Template& tpl, const std::filesystem::path& saliency,
         std::optional<std::filesystem::path> background, const planner::PlannerConfig& config,
         int threshold) {
        std::optional<img::GrayImage> bg;
        if (background) bg = img::load_gray(*background);
        const planner::PosterPlan plan = planner::plan_poster(
            tpl, load_saliency(saliency, threshold), bg ? &*bg : nullptr, config);
        py::dict objective;
        objective["occlusion"] = plan.objective.occlusion;
        objective["utility"] = plan.objective.utility;
        objective["unreadability"] = plan.objective.unreadability;
        objective["out_of_bounds"] = plan.objective.out_of_bounds;
        objective["overlap"] = plan.objective.overlap;
        objective["total"] = plan.objective.total;
        return py::make_tuple(plan.placements, objective);
      },
      py::arg("template"), py::arg("saliency_path"), py::arg("background_path") = std::nullopt,
      py::arg("config") = planner::PlannerConfig{}, py::arg("threshold") = 128);

  // corpus and pipeline operations
  m.def(
      "generate_synthetic",
      [](const std::filesystem::path& out_dir, std::uint64_t seed, int count,
         const std::string& profile, double val_fraction) {
        corpus::SynthOptions options;
        options.seed = seed;
        options.count = count;
        options.profile = corpus::synth_profile_from_string(profile);
        options.val_fraction = val_fraction;
        return static_cast<int>(corpus::generate_synthetic(out_dir, options).entries.size());
      },
      py::arg("out_dir"), py::arg("seed") = 0, py::arg("count") = 10,
      py::arg("profile") = "blank_canvas", py::arg("val_fraction") = 0.2);
  m.def("validate_corpus", [](const std::filesystem::path& root) {
    const auto result = corpus::validate_corpus(root);
    py::list violations;
    if (std::holds_alternative<std::vector<corpus::SchemaViolation>>(result)) {
      for (const corpus::SchemaViolation& v :
           std::get<std::vector<corpus::SchemaViolation>>(result)) {
        violations.append(py::make_tuple(v.record_id, v.pointer, v.message));
      }
    }
    return violations;
  });
  m.def(
      "build_instructions",
      [](const std::filesystem::path& corpus_dir, const std::filesystem::path& out,
         const std::string& split, int max_components) {
        cli::BuildArgs args;
        args.corpus_dir = corpus_dir;
        args.out = out;
        args.split = split;
        args.max_components = max_components;
        const cli::BuildCounts counts =
            cli::build_instructions(corpus::load_corpus(corpus_dir), args);
        return py::make_tuple(counts.coordinates, counts.recovering, counts.planning);
      },
      py::arg("corpus_dir"), py::arg("out_dir"), py::arg("split") = "all",
      py::arg("max_components") = 0);
  m.def(
      "plan_corpus",
      [](const std::filesystem::path& corpus_dir, const std::filesystem::path& out_file,
         const std::string& mode, const std::string& split, const planner::PlannerConfig& config) {
        cli::PlanArgs args;
        args.corpus_dir = corpus_dir;
        args.out_file = out_file;
        args.mode = mode;
        args.split = split;
        args.config = config;
        cli::plan_corpus(corpus::load_corpus(corpus_dir), args);
      },
      py::arg("corpus_dir"), py::arg("out_file"), py::arg("mode") = "auto",
      py::arg("split") = "val", py::arg("config") = planner::PlannerConfig{});
  m.def(
      "evaluate",
      [](const std::filesystem::path& corpus_dir, const std::filesystem::path& predictions,
         const std::string& split, const std::string& predictor, bool content_metrics) {
        cli::EvalArgs args;
        args.corpus_dir = corpus_dir;
        args.predictions = predictions;
        args.split = split;
        args.predictor = predictor;
        args.content_metrics = content_metrics;
        const report::EvalReport result =
            cli::run_eval(corpus::load_corpus(corpus_dir), args);
        return report::report_to_json(result).dump();
      },
      py::arg("corpus_dir"), py::arg("predictions"), py::arg("split") = "val",
      py::arg("predictor") = "predictions", py::arg("content_metrics") = true);
}
