#pragma once

#include <span>
#include <string>
#include <vector>

#include "layoutkit/geometry.hpp"

namespace layoutkit::metrics {

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr int kDefaultBins = 64;

struct ComponentScore {
  double iou = 0.0;
  int acc_left = 0;
  int acc_top = 0;
  int acc_width = 0;
  int acc_height = 0;
};

struct GeoMetricsRecord {
  std::string template_id;
  std::vector<ComponentScore> per_component;
  double template_miou = 0.0;
};

// Mean IoU over index-matched components.
double miou(std::span<const Placement> pred, std::span<const Placement> gold);

// 1 iff pred and gold land in the same of `bins` equal divisions of
// [0, axis_extent]. Values are clamped into the axis first; the boundary
// value v == extent maps to the last bin.
int quantized_accuracy(int pred_value, int gold_value, int axis_extent, int bins = kDefaultBins);

int quantize_bin(int value, int axis_extent, int bins = kDefaultBins);

// Per-component IoU and attribute accuracies for one template. left/width
// bin against the canvas width, top/height against the canvas height.
GeoMetricsRecord evaluate_template(const std::string& template_id,
                                   std::span<const Placement> pred,
                                   std::span<const Placement> gold, const Canvas& canvas,
                                   int bins = kDefaultBins);

// Percentages, e.g. miou == 43.75 for a mean IoU of 0.4375.
struct GeoSummary {
  double miou = 0.0;
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
};

// Macro average: per-template means averaged over templates.
GeoSummary aggregate_geo(std::span<const GeoMetricsRecord> records);

// Micro average: every component weighted equally.
GeoSummary aggregate_geo_micro(std::span<const GeoMetricsRecord> records);

// Two-decimal rendering used by reports, e.g. "43.75".
std::string format_pct(double value);

}  // namespace layoutkit::metrics
