#include "layoutkit/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "layoutkit/rng.hpp"

namespace layoutkit::planner {

namespace {

bool is_text(std::span<const ComponentKind> kinds, std::size_t i) {
  return i < kinds.size() && kinds[i] == ComponentKind::text;
}

double overlap_penalty(std::span<const Placement> layout, std::span<const ComponentKind> kinds,
                       const Canvas& canvas) {
  const double canvas_area = static_cast<double>(canvas.width) * canvas.height;
  double area = 0.0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!is_text(kinds, i)) continue;
    for (std::size_t j = i + 1; j < layout.size(); ++j) {
      if (!is_text(kinds, j)) continue;
      area += static_cast<double>(box_intersection_area(layout[i], layout[j]));
    }
  }
  return kOverlapWeight * area / canvas_area;
}

double out_of_bounds_penalty(std::span<const Placement> layout, const Canvas& canvas) {
  const Placement canvas_box{0, 0, canvas.width, canvas.height, 0};
  std::int64_t total = 0;
  std::int64_t outside = 0;
  for (const Placement& p : layout) {
    total += box_area(p);
    outside += box_area(p) - box_intersection_area(p, canvas_box);
  }
  if (total == 0) return 0.0;
  return kOutOfBoundsWeight * static_cast<double>(outside) / static_cast<double>(total);
}

}  // namespace

void require_valid(const PlannerConfig& config) {
  if (config.iterations < 1) throw ValidationError("planner iterations must be >= 1");
  if (!(config.cooling > 0.0 && config.cooling < 1.0)) {
    throw ValidationError("planner cooling factor must lie in (0, 1)");
  }
  if (config.w_occ < 0.0 || config.w_uti < 0.0 || config.w_rea < 0.0) {
    throw ValidationError("planner objective weights must be >= 0");
  }
  if (config.moves.translate < 0.0 || config.moves.resize < 0.0 ||
      config.moves.swap_layers < 0.0) {
    throw ValidationError("planner move weights must be >= 0");
  }
}

ObjectiveBreakdown evaluate_objective(std::span<const Placement> layout,
                                      std::span<const ComponentKind> kinds,
                                      const raster::SaliencyMap* saliency,
                                      const std::vector<double>* background_gradient,
                                      const Canvas& canvas, const PlannerConfig& config) {
  ObjectiveBreakdown out;
  if (saliency != nullptr) {
    out.occlusion = raster::occlusion_rate(layout, *saliency, canvas);
    out.utility = raster::utility_rate(layout, *saliency, canvas);
  }
  if (background_gradient != nullptr) {
    out.unreadability =
        raster::unreadability_from_field(layout, kinds, *background_gradient, canvas);
  }
  out.out_of_bounds = out_of_bounds_penalty(layout, canvas);
  out.overlap = overlap_penalty(layout, kinds, canvas);
  out.total = config.w_occ * out.occlusion - config.w_uti * out.utility +
              config.w_rea * out.unreadability / 100.0 + out.out_of_bounds + out.overlap;
  return out;
}

// ---------------------------------------------------------------------------
// blank-canvas heuristic
// ---------------------------------------------------------------------------

std::vector<Placement> plan_blank(const Template& tpl, const PlannerConfig& config) {
  require_valid(config);
  const int n = static_cast<int>(tpl.components.size());
  if (n == 0) return {};
  const int W = tpl.canvas.width;
  const int H = tpl.canvas.height;

  std::vector<Placement> out(static_cast<std::size_t>(n));

  auto natural_area = [&](int i) {
    const Component& c = tpl.components[static_cast<std::size_t>(i)];
    return static_cast<std::int64_t>(c.natural_width) * c.natural_height;
  };

  int backdrop = 0;
  for (int i = 1; i < n; ++i) {
    if (natural_area(i) > natural_area(backdrop)) backdrop = i;
  }
  out[static_cast<std::size_t>(backdrop)] = Placement{0, 0, W, H, 0};
  if (n == 1) return out;

  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (i != backdrop) rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](int a, int b) { return natural_area(a) > natural_area(b); });
  for (std::size_t rank = 0; rank < rest.size(); ++rank) {
    out[static_cast<std::size_t>(rest[rank])].layer = static_cast<int>(rank) + 1;
  }

  const int margin = std::max(1, (std::min(W, H) * 4 + 50) / 100);
  const int gap = std::max(1, (std::min(W, H) * 2 + 50) / 100);
  const int inner_w = std::max(1, W - 2 * margin);
  const int inner_h = std::max(1, H - 2 * margin);
  const double col_w = inner_w / 12.0;

  struct Item {
    int component;
    int width;
    int height;
    int span;
  };

  struct Row {
    std::vector<Item> items;
    int height = 0;
  };

  // Shrink a global scale until the flow layout fits the canvas.
  double scale = 0.0;
  for (int i : rest) {
    const Component& c = tpl.components[static_cast<std::size_t>(i)];
    scale = std::max(scale, static_cast<double>(inner_w) / c.natural_width);
    scale = std::max(scale, static_cast<double>(inner_h) / c.natural_height);
  }
  std::vector<Row> rows;
  for (int guard = 0; guard < 400; ++guard) {
    rows.clear();
    Row row;
    int used_cols = 0;
    int total_h = 0;
    bool ok = true;
    for (int i : rest) {
      const Component& c = tpl.components[static_cast<std::size_t>(i)];
      const int w = std::clamp(static_cast<int>(std::llround(c.natural_width * scale)), 1, inner_w);
      const int h = std::clamp(static_cast<int>(std::llround(c.natural_height * scale)), 1, inner_h);
      const int span = std::clamp(static_cast<int>(std::ceil(w / col_w)), 1, 12);
      if (used_cols + span > 12 && !row.items.empty()) {
        total_h += row.height + gap;
        rows.push_back(std::move(row));
        row = Row{};
        used_cols = 0;
      }
      row.items.push_back({i, w, h, span});
      row.height = std::max(row.height, h);
      used_cols += span;
    }
    if (!row.items.empty()) {
      total_h += row.height;
      rows.push_back(std::move(row));
    }
    ok = total_h <= inner_h;
    if (ok) break;
    scale *= 0.92;
  }

  int total_h = 0;
  for (const Row& row : rows) total_h += row.height;
  total_h += gap * std::max(0, static_cast<int>(rows.size()) - 1);
  int y = margin + std::max(0, (inner_h - total_h) / 2);
  for (const Row& row : rows) {
    int span_total = 0;
    for (const Item& item : row.items) span_total += item.span;
    const int start_col = std::max(0, (12 - span_total) / 2);
    int col = start_col;
    for (const Item& item : row.items) {
      const int span_px = static_cast<int>(std::llround(item.span * col_w));
      const int x = margin + static_cast<int>(std::llround(col * col_w)) +
                    std::max(0, (span_px - item.width) / 2);
      Placement& p = out[static_cast<std::size_t>(item.component)];
      p.left = x;
      p.top = y + std::max(0, (row.height - item.height) / 2);
      p.width = item.width;
      p.height = item.height;
      p = clamp_to_canvas(p, tpl.canvas);
      col += item.span;
    }
    y += row.height + gap;
  }
  return out;
}

// ---------------------------------------------------------------------------
// poster annealer
// ---------------------------------------------------------------------------

namespace {

// Coverage-count state with O(moved box area) updates.
class CoverageState {
 public:
  CoverageState(const Canvas& canvas, const raster::SaliencyMap& saliency,
                const std::vector<double>* gradient, std::span<const ComponentKind> kinds)
      : width_(canvas.width),
        height_(canvas.height),
        kinds_(kinds.begin(), kinds.end()),
        gradient_(gradient),
        cov_all_(static_cast<std::size_t>(width_) * height_, 0),
        cov_text_(static_cast<std::size_t>(width_) * height_, 0),
        salient_(static_cast<std::size_t>(width_) * height_, 0) {
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const bool s = saliency.salient(x, y);
        salient_[index(x, y)] = s ? 1 : 0;
        if (s) {
          ++salient_total_;
        } else {
          ++nonsalient_total_;
        }
      }
    }
  }

  void add(const Placement& p, std::size_t component) { update(p, component, +1); }
  void remove(const Placement& p, std::size_t component) { update(p, component, -1); }

  double occlusion() const {
    return salient_total_ == 0 ? 0.0
                               : static_cast<double>(salient_covered_) / salient_total_;
  }
  double utility() const {
    return nonsalient_total_ == 0 ? 0.0
                                  : static_cast<double>(nonsalient_covered_) / nonsalient_total_;
  }
  double unreadability() const {
    if (text_pixels_ == 0 || gradient_ == nullptr) return 0.0;
    return (text_grad_sum_ / static_cast<double>(text_pixels_)) / raster::kMaxSobelMagnitude *
           100.0;
  }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  void update(const Placement& p, std::size_t component, int delta) {
    const bool text = component < kinds_.size() && kinds_[component] == ComponentKind::text;
    for (int y = p.top; y < p.top + p.height; ++y) {
      for (int x = p.left; x < p.left + p.width; ++x) {
        const std::size_t i = index(x, y);
        const std::uint16_t before = cov_all_[i];
        cov_all_[i] = static_cast<std::uint16_t>(before + delta);
        if (delta > 0 && before == 0) {
          if (salient_[i]) {
            ++salient_covered_;
          } else {
            ++nonsalient_covered_;
          }
        } else if (delta < 0 && cov_all_[i] == 0) {
          if (salient_[i]) {
            --salient_covered_;
          } else {
            --nonsalient_covered_;
          }
        }
        if (text) {
          const std::uint16_t tbefore = cov_text_[i];
          cov_text_[i] = static_cast<std::uint16_t>(tbefore + delta);
          if (delta > 0 && tbefore == 0) {
            ++text_pixels_;
            if (gradient_) text_grad_sum_ += (*gradient_)[i];
          } else if (delta < 0 && cov_text_[i] == 0) {
            --text_pixels_;
            if (gradient_) text_grad_sum_ -= (*gradient_)[i];
          }
        }
      }
    }
  }

  int width_;
  int height_;
  std::vector<ComponentKind> kinds_;
  const std::vector<double>* gradient_;
  std::vector<std::uint16_t> cov_all_;
  std::vector<std::uint16_t> cov_text_;
  std::vector<std::uint8_t> salient_;
  std::int64_t salient_total_ = 0;
  std::int64_t nonsalient_total_ = 0;
  std::int64_t salient_covered_ = 0;
  std::int64_t nonsalient_covered_ = 0;
  std::int64_t text_pixels_ = 0;
  double text_grad_sum_ = 0.0;
};

// Starting sizes: roughly equal area shares at each component's aspect.
Placement initial_size(const Component& c, const Canvas& canvas, int n) {
  const double area_fraction = std::min(0.18, 0.7 / std::max(1, n));
  const double target_area = area_fraction * canvas.width * canvas.height;
  const double aspect =
      static_cast<double>(std::max(1, c.natural_width)) / std::max(1, c.natural_height);
  int w = static_cast<int>(std::llround(std::sqrt(target_area * aspect)));
  int h = static_cast<int>(std::llround(std::sqrt(target_area / aspect)));
  Placement p;
  p.width = std::clamp(w, kMinBoxEdge, canvas.width);
  p.height = std::clamp(h, kMinBoxEdge, canvas.height);
  return p;
}

// Tile elements into the least-salient row bands, one band per element.
std::vector<Placement> initial_layout(const Template& tpl, const raster::SaliencyMap& saliency) {
  const Canvas& canvas = tpl.canvas;
  const int n = static_cast<int>(tpl.components.size());
  std::vector<double> row_cost(static_cast<std::size_t>(canvas.height), 0.0);
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      if (saliency.salient(x, y)) row_cost[static_cast<std::size_t>(y)] += 1.0;
    }
  }
  std::vector<double> prefix(static_cast<std::size_t>(canvas.height) + 1, 0.0);
  auto rebuild_prefix = [&] {
    for (int y = 0; y < canvas.height; ++y) {
      prefix[static_cast<std::size_t>(y) + 1] = prefix[static_cast<std::size_t>(y)] +
                                                row_cost[static_cast<std::size_t>(y)];
    }
  };
  rebuild_prefix();

  std::vector<Placement> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Placement p = initial_size(tpl.components[static_cast<std::size_t>(k)], canvas, n);
    int best_top = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int y = 0; y + p.height <= canvas.height; ++y) {
      const double cost = prefix[static_cast<std::size_t>(y + p.height)] -
                          prefix[static_cast<std::size_t>(y)];
      if (cost < best_cost) {
        best_cost = cost;
        best_top = y;
      }
    }
    p.top = best_top;
    p.left = std::max(0, (canvas.width - p.width) / 2);
    p.layer = k;
    out.push_back(p);
    // Occupied bands repel later elements.
    for (int y = best_top; y < best_top + p.height; ++y) {
      row_cost[static_cast<std::size_t>(y)] += canvas.width;
    }
    rebuild_prefix();
  }
  return out;
}

double text_pair_overlap(const std::vector<Placement>& layout,
                         std::span<const ComponentKind> kinds, std::size_t moved) {
  double area = 0.0;
  if (!is_text(kinds, moved)) return 0.0;
  for (std::size_t j = 0; j < layout.size(); ++j) {
    if (j == moved || !is_text(kinds, j)) continue;
    area += static_cast<double>(box_intersection_area(layout[moved], layout[j]));
  }
  return area;
}

}  // namespace

PosterPlan plan_poster(const Template& tpl, const raster::SaliencyMap& saliency,
                       const img::GrayImage* background, const PlannerConfig& config,
                       AnnealTrace* trace) {
  require_valid(config);
  const Canvas& canvas = tpl.canvas;
  if (saliency.width() != canvas.width || saliency.height() != canvas.height) {
    throw raster::DimensionMismatch("saliency map does not match the canvas");
  }
  const int n = static_cast<int>(tpl.components.size());
  if (n == 0) return {};

  std::vector<ComponentKind> kinds;
  kinds.reserve(tpl.components.size());
  for (const Component& c : tpl.components) kinds.push_back(c.kind);

  std::optional<std::vector<double>> gradient;
  if (background != nullptr) {
    if (background->width != canvas.width || background->height != canvas.height) {
      throw raster::DimensionMismatch("background does not match the canvas");
    }
    gradient = raster::sobel_magnitude(*background);
  }
  const std::vector<double>* gradient_ptr = gradient ? &*gradient : nullptr;

  std::vector<Placement> current = initial_layout(tpl, saliency);
  CoverageState coverage(canvas, saliency, gradient_ptr, kinds);
  double overlap_area = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    coverage.add(current[i], i);
  }
  for (std::size_t i = 0; i < current.size(); ++i) {
    overlap_area += text_pair_overlap(current, kinds, i);
  }
  overlap_area /= 2.0;  // each text pair counted twice

  const double canvas_area = static_cast<double>(canvas.width) * canvas.height;
  auto total_of = [&](double overlap_area_px) {
    return config.w_occ * coverage.occlusion() - config.w_uti * coverage.utility() +
           config.w_rea * coverage.unreadability() / 100.0 +
           kOverlapWeight * overlap_area_px / canvas_area;
  };

  double current_total = total_of(overlap_area);
  std::vector<Placement> best = current;
  double best_total = current_total;

  Rng rng(config.seed * 0x9E3779B97F4A7C15ull + 0xC2B2AE3D27D4EB4Full);
  double temperature = config.initial_temperature;
  const double move_sum =
      config.moves.translate + config.moves.resize + config.moves.swap_layers;

  if (trace != nullptr) {
    trace->initial_placements = current;
    trace->initial_total = current_total;
    trace->best_totals.clear();
    trace->current_totals.clear();
    trace->best_totals.reserve(static_cast<std::size_t>(config.iterations));
    trace->current_totals.reserve(static_cast<std::size_t>(config.iterations));
  }

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double roll = move_sum > 0.0 ? rng.uniform01() * move_sum : 0.0;
    if (n >= 2 && roll >= config.moves.translate + config.moves.resize) {
      // Swapping stacking order never changes coverage; always accept.
      const int a = rng.below(n);
      int b = rng.below(n - 1);
      if (b >= a) ++b;
      std::swap(current[static_cast<std::size_t>(a)].layer,
                current[static_cast<std::size_t>(b)].layer);
    } else {
      const std::size_t i = static_cast<std::size_t>(rng.below(n));
      const Placement old = current[i];
      Placement next = old;
      if (roll < config.moves.translate || n < 2) {
        next.left = std::clamp(old.left + rng.range(-16, 16), 0, canvas.width - old.width);
        next.top = std::clamp(old.top + rng.range(-16, 16), 0, canvas.height - old.height);
      } else {
        const double factor = 0.8 + 0.45 * rng.uniform01();
        if (rng.chance(0.5)) {
          next.width = std::clamp(static_cast<int>(std::llround(old.width * factor)), kMinBoxEdge,
                                  canvas.width);
        } else {
          next.height = std::clamp(static_cast<int>(std::llround(old.height * factor)),
                                   kMinBoxEdge, canvas.height);
        }
        next.left = std::clamp(next.left, 0, canvas.width - next.width);
        next.top = std::clamp(next.top, 0, canvas.height - next.height);
      }

      const double old_pair = text_pair_overlap(current, kinds, i);
      coverage.remove(old, i);
      current[i] = next;
      coverage.add(next, i);
      const double new_pair = text_pair_overlap(current, kinds, i);
      const double new_overlap = overlap_area - old_pair + new_pair;
      const double new_total = total_of(new_overlap);
      const double delta = new_total - current_total;
      bool accept = delta <= 0.0;
      if (!accept && temperature > 0.0) {
        accept = rng.uniform01() < std::exp(-delta / temperature);
      }
      if (accept) {
        current_total = new_total;
        overlap_area = new_overlap;
        if (new_total < best_total) {
          best_total = new_total;
          best = current;
        }
      } else {
        coverage.remove(next, i);
        current[i] = old;
        coverage.add(old, i);
      }
    }
    temperature *= config.cooling;
    if (trace != nullptr) {
      trace->best_totals.push_back(best_total);
      trace->current_totals.push_back(current_total);
    }
  }

  PosterPlan plan;
  plan.placements = std::move(best);
  plan.objective = evaluate_objective(plan.placements, kinds, &saliency, gradient_ptr, canvas,
                                      config);
  return plan;
}

std::vector<Placement> plan_random(const Template& tpl, const PlannerConfig& config) {
  const Canvas& canvas = tpl.canvas;
  const int n = static_cast<int>(tpl.components.size());
  Rng rng(config.seed * 0x9E3779B97F4A7C15ull + 0xA0761D6478BD642Full);
  std::vector<int> layers(static_cast<std::size_t>(n));
  std::iota(layers.begin(), layers.end(), 0);
  for (int k = n - 1; k > 0; --k) {
    std::swap(layers[static_cast<std::size_t>(k)],
              layers[static_cast<std::size_t>(rng.below(k + 1))]);
  }
  std::vector<Placement> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Placement p;
    p.width = rng.range(kMinBoxEdge, canvas.width);
    p.height = rng.range(kMinBoxEdge, canvas.height);
    p.left = rng.below(canvas.width - p.width + 1);
    p.top = rng.below(canvas.height - p.height + 1);
    p.layer = layers[static_cast<std::size_t>(k)];
    out.push_back(p);
  }
  return out;
}

}  // namespace layoutkit::planner
