#include "layoutkit/metrics.hpp"

#include <algorithm>
#include <cstdio>

namespace layoutkit::metrics {

double miou(std::span<const Placement> pred, std::span<const Placement> gold) {
  if (pred.size() != gold.size()) {
    throw LengthMismatch("miou: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(gold.size()) + " gold boxes");
  }
  if (pred.empty()) throw LengthMismatch("miou: empty layouts");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += iou(pred[i], gold[i]);
  return sum / static_cast<double>(pred.size());
}

int quantize_bin(int value, int axis_extent, int bins) {
  const std::int64_t v = std::clamp<std::int64_t>(value, 0, axis_extent);
  const std::int64_t bin = v * bins / axis_extent;  // floor for non-negative v
  return static_cast<int>(std::min<std::int64_t>(bin, bins - 1));
}

int quantized_accuracy(int pred_value, int gold_value, int axis_extent, int bins) {
  if (axis_extent < 1) throw ValidationError("axis_extent must be >= 1");
  if (bins < 1) throw ValidationError("bins must be >= 1");
  return quantize_bin(pred_value, axis_extent, bins) == quantize_bin(gold_value, axis_extent, bins)
             ? 1
             : 0;
}

GeoMetricsRecord evaluate_template(const std::string& template_id,
                                   std::span<const Placement> pred,
                                   std::span<const Placement> gold, const Canvas& canvas,
                                   int bins) {
  if (pred.size() != gold.size()) {
    throw LengthMismatch("template " + template_id + ": " + std::to_string(pred.size()) +
                         " predictions vs " + std::to_string(gold.size()) + " gold boxes");
  }
  GeoMetricsRecord record;
  record.template_id = template_id;
  record.per_component.reserve(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ComponentScore score;
    score.iou = iou(pred[i], gold[i]);
    score.acc_left = quantized_accuracy(pred[i].left, gold[i].left, canvas.width, bins);
    score.acc_width = quantized_accuracy(pred[i].width, gold[i].width, canvas.width, bins);
    score.acc_top = quantized_accuracy(pred[i].top, gold[i].top, canvas.height, bins);
    score.acc_height = quantized_accuracy(pred[i].height, gold[i].height, canvas.height, bins);
    sum += score.iou;
    record.per_component.push_back(score);
  }
  record.template_miou = pred.empty() ? 0.0 : sum / static_cast<double>(pred.size());
  return record;
}

namespace {

struct Totals {
  double iou = 0.0;
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  void add(const ComponentScore& s) {
    iou += s.iou;
    left += s.acc_left;
    top += s.acc_top;
    width += s.acc_width;
    height += s.acc_height;
  }

  Totals scaled(double denom) const {
    return Totals{iou / denom, left / denom, top / denom, width / denom, height / denom};
  }

  GeoSummary as_percent(double denom) const {
    GeoSummary out;
    out.miou = iou / denom * 100.0;
    out.left = left / denom * 100.0;
    out.top = top / denom * 100.0;
    out.width = width / denom * 100.0;
    out.height = height / denom * 100.0;
    return out;
  }
};

}  // namespace

GeoSummary aggregate_geo(std::span<const GeoMetricsRecord> records) {
  if (records.empty()) throw EmptyInput("aggregate_geo: no records");
  // Per-template means first, so an all-ones run aggregates to exactly 100.
  Totals sum_of_means;
  for (const GeoMetricsRecord& r : records) {
    if (r.per_component.empty()) continue;
    Totals per_template;
    for (const ComponentScore& s : r.per_component) per_template.add(s);
    const Totals mean = per_template.scaled(static_cast<double>(r.per_component.size()));
    sum_of_means.iou += mean.iou;
    sum_of_means.left += mean.left;
    sum_of_means.top += mean.top;
    sum_of_means.width += mean.width;
    sum_of_means.height += mean.height;
  }
  return sum_of_means.as_percent(static_cast<double>(records.size()));
}

GeoSummary aggregate_geo_micro(std::span<const GeoMetricsRecord> records) {
  if (records.empty()) throw EmptyInput("aggregate_geo_micro: no records");
  Totals totals;
  std::int64_t count = 0;
  for (const GeoMetricsRecord& r : records) {
    for (const ComponentScore& s : r.per_component) {
      totals.add(s);
      ++count;
    }
  }
  if (count == 0) throw EmptyInput("aggregate_geo_micro: no components");
  return totals.as_percent(static_cast<double>(count));
}

std::string format_pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

}  // namespace layoutkit::metrics
