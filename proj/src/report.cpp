#include "layoutkit/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "layoutkit/raster.hpp"

namespace layoutkit::report {

namespace {

using nlohmann::json;
using metrics::format_pct;

}  // namespace

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open predictions file: " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ValidationError("predictions line " + std::to_string(line_no) + ": invalid JSON");
    }
    PredictionRecord record;
    record.template_id = j.value("template_id", std::string());
    if (record.template_id.empty()) {
      throw ValidationError("predictions line " + std::to_string(line_no) +
                            ": missing template_id");
    }
    record.css_text = j.value("css_text", std::string());
    if (auto it = j.find("placements"); it != j.end() && it->is_array()) {
      for (const json& pj : *it) {
        Placement p;
        p.left = pj.value("left", 0);
        p.top = pj.value("top", 0);
        p.width = pj.value("width", 1);
        p.height = pj.value("height", 1);
        p.layer = pj.value("layer", 0);
        record.placements.push_back(p);
      }
    }
    if (auto it = j.find("diagnostics"); it != j.end() && it->is_object()) {
      if (auto r = it->find("repaired"); r != it->end() && r->is_array()) {
        record.repaired_count = static_cast<int>(r->size());
      }
      record.dropped_text = it->value("dropped_text", 0);
    }
    record.fallback = j.value("fallback", false);
    if (auto it = j.find("objective"); it != j.end()) record.objective = *it;
    out.push_back(std::move(record));
  }
  return out;
}

EvalReport evaluate(const corpus::Corpus& corpus,
                    const std::vector<PredictionRecord>& predictions,
                    const EvalOptions& options) {
  std::map<std::string, const PredictionRecord*> by_id;
  std::map<std::string, const Template*> corpus_ids;
  for (const corpus::CorpusEntry& entry : corpus.entries) corpus_ids[entry.tpl.id] = &entry.tpl;
  for (const PredictionRecord& p : predictions) {
    if (corpus_ids.find(p.template_id) == corpus_ids.end()) {
      throw CorpusMismatch("prediction references unknown template '" + p.template_id + "'");
    }
    by_id[p.template_id] = &p;
  }

  std::vector<const Template*> selected;
  for (const corpus::CorpusEntry& entry : corpus.entries) {
    if (options.split != "all" && entry.split != options.split) continue;
    if (options.max_components > 0 &&
        static_cast<int>(entry.tpl.components.size()) > options.max_components) {
      continue;
    }
    selected.push_back(&entry.tpl);
  }
  if (selected.empty()) {
    throw ValidationError("no templates in split '" + options.split + "'");
  }

  std::vector<std::string> missing;
  for (const Template* tpl : selected) {
    if (by_id.find(tpl->id) == by_id.end()) missing.push_back(tpl->id);
  }
  if (!missing.empty()) {
    std::string message = "predictions missing for " + std::to_string(missing.size()) +
                          " template(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) message += " " + missing[i];
    if (missing.size() > 10) message += " ...";
    throw MissingPredictions(message, std::move(missing));
  }

  EvalReport report;
  report.manifest = options.manifest;

  std::vector<metrics::GeoMetricsRecord> geo_records;
  double occ_sum = 0.0, uti_sum = 0.0, rea_sum = 0.0;
  int content_count = 0;

  for (const Template* tpl : selected) {
    const PredictionRecord& pred = *by_id.at(tpl->id);
    if (tpl->components.empty()) {
      throw CorpusMismatch("template '" + tpl->id + "' has no components to score");
    }
    if (!tpl->gold) {
      throw CorpusMismatch("template '" + tpl->id + "' has no gold layout to score against");
    }
    if (pred.placements.size() != tpl->components.size()) {
      throw CorpusMismatch("template '" + tpl->id + "': prediction has " +
                           std::to_string(pred.placements.size()) + " placements for " +
                           std::to_string(tpl->components.size()) + " components");
    }

    TemplateReport tr;
    tr.template_id = tpl->id;
    tr.n_components = static_cast<int>(tpl->components.size());
    tr.geo = metrics::evaluate_template(tpl->id, pred.placements, *tpl->gold, tpl->canvas);
    tr.repaired_count = pred.repaired_count;
    tr.dropped_text = pred.dropped_text;
    tr.fallback = pred.fallback;

    const double canvas_area = static_cast<double>(tpl->canvas.width) * tpl->canvas.height;
    for (const Placement& g : *tpl->gold) {
      tr.relative_sizes.push_back(static_cast<double>(box_area(g)) / canvas_area);
    }

    if (options.content_metrics && tpl->saliency) {
      raster::SaliencyMap saliency;
      saliency.map = img::load_gray(corpus.root / *tpl->saliency);
      tr.occlusion = raster::occlusion_rate(pred.placements, saliency, tpl->canvas);
      tr.utility = raster::utility_rate(pred.placements, saliency, tpl->canvas);
      if (tpl->canvas.background) {
        std::vector<ComponentKind> kinds;
        for (const Component& c : tpl->components) kinds.push_back(c.kind);
        const img::GrayImage background = img::load_gray(corpus.root / *tpl->canvas.background);
        tr.unreadability =
            raster::unreadability(pred.placements, kinds, background, tpl->canvas);
      }
      occ_sum += *tr.occlusion;
      uti_sum += *tr.utility;
      rea_sum += tr.unreadability.value_or(0.0);
      ++content_count;
    }

    geo_records.push_back(tr.geo);
    report.templates.push_back(std::move(tr));
  }

  report.geo_macro = metrics::aggregate_geo(geo_records);
  report.geo_micro = metrics::aggregate_geo_micro(geo_records);

  if (content_count > 0) {
    ContentSummary content;
    content.occlusion = occ_sum / content_count * 100.0;
    content.utility = uti_sum / content_count * 100.0;
    content.unreadability = rea_sum / content_count;
    content.templates = content_count;
    report.content = content;
  }

  // Breakdown by component count: buckets 1, 2, 3, 4+.
  {
    struct Acc {
      int n = 0;
      double miou = 0.0;
    };
    Acc acc[4];
    for (const TemplateReport& tr : report.templates) {
      const int bucket = std::min(tr.n_components, 4) - 1;
      acc[bucket].n += 1;
      acc[bucket].miou += tr.geo.template_miou;
    }
    const char* labels[4] = {"1", "2", "3", "4+"};
    for (int b = 0; b < 4; ++b) {
      CountBucket bucket;
      bucket.label = labels[b];
      bucket.templates = acc[b].n;
      bucket.miou_pct = acc[b].n > 0 ? acc[b].miou / acc[b].n * 100.0 : 0.0;
      report.by_component_count.push_back(bucket);
    }
  }

  // Breakdown by relative component size, in deciles of gold area fraction.
  {
    struct Acc {
      int n = 0;
      double iou = 0.0;
    };
    Acc acc[10];
    for (const TemplateReport& tr : report.templates) {
      for (std::size_t k = 0; k < tr.relative_sizes.size(); ++k) {
        const int decile =
            std::clamp(static_cast<int>(tr.relative_sizes[k] * 10.0), 0, 9);
        acc[decile].n += 1;
        acc[decile].iou += tr.geo.per_component[k].iou;
      }
    }
    for (int d = 0; d < 10; ++d) {
      DecileBucket bucket;
      bucket.decile = d;
      bucket.components = acc[d].n;
      bucket.iou_pct = acc[d].n > 0 ? acc[d].iou / acc[d].n * 100.0 : 0.0;
      report.by_relative_size.push_back(bucket);
    }
  }

  return report;
}

json report_to_json(const EvalReport& report) {
  json templates = json::array();
  for (const TemplateReport& tr : report.templates) {
    json per_component = json::array();
    for (const metrics::ComponentScore& s : tr.geo.per_component) {
      per_component.push_back({{"iou", s.iou},
                               {"acc_left", s.acc_left},
                               {"acc_top", s.acc_top},
                               {"acc_width", s.acc_width},
                               {"acc_height", s.acc_height}});
    }
    json t{
        {"template_id", tr.template_id},
        {"n_components", tr.n_components},
        {"miou", tr.geo.template_miou},
        {"per_component", std::move(per_component)},
        {"relative_sizes", tr.relative_sizes},
        {"diagnostics",
         {{"repaired", tr.repaired_count}, {"dropped_text", tr.dropped_text},
          {"fallback", tr.fallback}}},
    };
    if (tr.occlusion) t["occlusion"] = *tr.occlusion;
    if (tr.utility) t["utility"] = *tr.utility;
    if (tr.unreadability) t["unreadability"] = *tr.unreadability;
    templates.push_back(std::move(t));
  }

  json aggregates{
      {"geo",
       {{"miou", report.geo_macro.miou},
        {"left", report.geo_macro.left},
        {"top", report.geo_macro.top},
        {"width", report.geo_macro.width},
        {"height", report.geo_macro.height}}},
      {"geo_micro",
       {{"miou", report.geo_micro.miou},
        {"left", report.geo_micro.left},
        {"top", report.geo_micro.top},
        {"width", report.geo_micro.width},
        {"height", report.geo_micro.height}}},
  };
  if (report.content) {
    aggregates["content"] = {{"occlusion", report.content->occlusion},
                             {"utility", report.content->utility},
                             {"unreadability", report.content->unreadability},
                             {"templates", report.content->templates}};
  }

  json count_buckets = json::array();
  for (const CountBucket& b : report.by_component_count) {
    count_buckets.push_back(
        {{"components", b.label}, {"templates", b.templates}, {"miou", b.miou_pct}});
  }
  json size_buckets = json::array();
  for (const DecileBucket& b : report.by_relative_size) {
    size_buckets.push_back(
        {{"decile", b.decile}, {"components", b.components}, {"iou", b.iou_pct}});
  }

  return json{
      {"manifest",
       {{"corpus", report.manifest.corpus},
        {"predictor", report.manifest.predictor},
        {"flags", report.manifest.flags},
        {"seed", report.manifest.seed},
        {"toolkit_version", report.manifest.toolkit_version}}},
      {"aggregate", std::move(aggregates)},
      {"breakdowns",
       {{"by_component_count", std::move(count_buckets)},
        {"by_relative_size_decile", std::move(size_buckets)}}},
      {"templates", std::move(templates)},
  };
}

std::string render_markdown(const EvalReport& report) {
  std::ostringstream out;
  out << "# Evaluation report\n\n";
  out << "corpus: `" << report.manifest.corpus << "` · predictor: `"
      << report.manifest.predictor << "` · templates: " << report.templates.size()
      << " · toolkit " << report.manifest.toolkit_version << "\n\n";

  out << "## Geometric metrics\n\n";
  out << "| Model | mIoU | Left | Top | Width | Height |\n";
  out << "|---|---:|---:|---:|---:|---:|\n";
  out << "| " << report.manifest.predictor << " | " << format_pct(report.geo_macro.miou) << " | "
      << format_pct(report.geo_macro.left) << " | " << format_pct(report.geo_macro.top) << " | "
      << format_pct(report.geo_macro.width) << " | " << format_pct(report.geo_macro.height)
      << " |\n\n";
  out << "Macro aggregation (per-template mean, then mean over templates); micro mIoU "
      << format_pct(report.geo_micro.miou) << ".\n\n";

  if (report.content) {
    out << "## Content-aware metrics\n\n";
    out << "| Model | Occ. ↓ | Uti. ↑ | Rea. ↓ |\n";
    out << "|---|---:|---:|---:|\n";
    out << "| " << report.manifest.predictor << " | " << format_pct(report.content->occlusion)
        << " | " << format_pct(report.content->utility) << " | "
        << format_pct(report.content->unreadability) << " |\n\n";
    out << report.content->templates << " templates carried saliency maps.\n\n";
  }

  out << "## mIoU by component count\n\n";
  out << "| Components |";
  for (const CountBucket& b : report.by_component_count) out << " " << b.label << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.by_component_count.size(); ++i) out << "---:|";
  out << "\n| mIoU |";
  for (const CountBucket& b : report.by_component_count) {
    out << " " << (b.templates > 0 ? format_pct(b.miou_pct) : "-") << " |";
  }
  out << "\n| Templates |";
  for (const CountBucket& b : report.by_component_count) out << " " << b.templates << " |";
  out << "\n\n";

  out << "## IoU by relative component size\n\n";
  out << "| Size |";
  for (const DecileBucket& b : report.by_relative_size) {
    out << " " << b.decile * 10 << "-" << (b.decile + 1) * 10 << "% |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < report.by_relative_size.size(); ++i) out << "---:|";
  out << "\n| IoU |";
  for (const DecileBucket& b : report.by_relative_size) {
    out << " " << (b.components > 0 ? format_pct(b.iou_pct) : "-") << " |";
  }
  out << "\n| Components |";
  for (const DecileBucket& b : report.by_relative_size) out << " " << b.components << " |";
  out << "\n";
  return out.str();
}

std::string render_breakdown_svg(const EvalReport& report) {
  // Two simple bar groups: mIoU by component count, IoU by size decile.
  const int bar_w = 28;
  const int gap = 10;
  const int chart_h = 140;
  const int base_y = 30 + chart_h;
  const int left_block = static_cast<int>(report.by_component_count.size()) * (bar_w + gap);
  const int width = 40 + left_block + 60 +
                    static_cast<int>(report.by_relative_size.size()) * (bar_w + gap) + 20;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << base_y + 40 << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"40\" y=\"18\">mIoU by component count</text>\n";
  int x = 40;
  for (const CountBucket& b : report.by_component_count) {
    const int h = static_cast<int>(b.miou_pct / 100.0 * chart_h);
    out << "<rect x=\"" << x << "\" y=\"" << base_y - h << "\" width=\"" << bar_w
        << "\" height=\"" << h << "\" fill=\"#4878a8\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << base_y + 12 << "\">" << b.label << "</text>\n";
    out << "<text x=\"" << x << "\" y=\"" << base_y - h - 4 << "\">"
        << format_pct(b.miou_pct) << "</text>\n";
    x += bar_w + gap;
  }
  x += 60;
  out << "<text x=\"" << x << "\" y=\"18\">IoU by relative size decile</text>\n";
  for (const DecileBucket& b : report.by_relative_size) {
    const int h = static_cast<int>(b.iou_pct / 100.0 * chart_h);
    out << "<rect x=\"" << x << "\" y=\"" << base_y - h << "\" width=\"" << bar_w
        << "\" height=\"" << h << "\" fill=\"#a85848\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << base_y + 12 << "\">" << b.decile << "</text>\n";
    x += bar_w + gap;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace layoutkit::report
