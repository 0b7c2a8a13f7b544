#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutkit/corpus.hpp"
#include "layoutkit/metrics.hpp"

namespace layoutkit::report {

class MissingPredictions : public ValidationError {
 public:
  MissingPredictions(const std::string& message, std::vector<std::string> ids)
      : ValidationError(message), missing_ids_(std::move(ids)) {}
  const std::vector<std::string>& missing_ids() const { return missing_ids_; }

 private:
  std::vector<std::string> missing_ids_;
};

class CorpusMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct PredictionRecord {
  std::string template_id;
  std::string css_text;
  std::vector<Placement> placements;
  int repaired_count = 0;
  int dropped_text = 0;
  bool fallback = false;
  nlohmann::json objective;  // planner breakdown when present
};

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

struct RunManifest {
  std::string corpus;
  std::string predictor;
  nlohmann::json flags;
  std::uint64_t seed = 0;
  std::string toolkit_version;
};

struct TemplateReport {
  std::string template_id;
  int n_components = 0;
  metrics::GeoMetricsRecord geo;
  std::optional<double> occlusion;      // fraction
  std::optional<double> utility;        // fraction
  std::optional<double> unreadability;  // 0..100
  int repaired_count = 0;
  int dropped_text = 0;
  bool fallback = false;
  std::vector<double> relative_sizes;  // gold area / canvas area, per component
};

struct ContentSummary {
  double occlusion = 0.0;      // percent
  double utility = 0.0;        // percent
  double unreadability = 0.0;  // 0..100 scale already
  int templates = 0;
};

struct CountBucket {
  std::string label;  // "1", "2", "3", "4+"
  int templates = 0;
  double miou_pct = 0.0;
};

struct DecileBucket {
  int decile = 0;  // relative size in [decile/10, (decile+1)/10)
  int components = 0;
  double iou_pct = 0.0;
};

struct EvalReport {
  RunManifest manifest;
  std::vector<TemplateReport> templates;
  metrics::GeoSummary geo_macro;
  metrics::GeoSummary geo_micro;
  std::optional<ContentSummary> content;
  std::vector<CountBucket> by_component_count;
  std::vector<DecileBucket> by_relative_size;
};

struct EvalOptions {
  std::string split = "val";
  int max_components = 0;       // 0 = no cap; mirrors the dataset emission flag
  bool content_metrics = true;  // computed where saliency exists
  RunManifest manifest;
};

// Scores predictions against the corpus gold. Throws MissingPredictions when
// a selected template has no prediction line and CorpusMismatch when a
// prediction does not line up with the corpus.
EvalReport evaluate(const corpus::Corpus& corpus,
                    const std::vector<PredictionRecord>& predictions,
                    const EvalOptions& options);

nlohmann::json report_to_json(const EvalReport& report);
std::string render_markdown(const EvalReport& report);
std::string render_breakdown_svg(const EvalReport& report);

}  // namespace layoutkit::report
