#include "layoutkit/geometry.hpp"

#include <algorithm>
#include <unordered_set>

namespace layoutkit {

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::image: return "image";
    case ComponentKind::text: return "text";
    case ComponentKind::logo: return "logo";
    case ComponentKind::decoration: return "decoration";
    case ComponentKind::other: return "other";
  }
  return "other";
}

ComponentKind component_kind_from_string(std::string_view name) {
  if (name == "image") return ComponentKind::image;
  if (name == "text") return ComponentKind::text;
  if (name == "logo") return ComponentKind::logo;
  if (name == "decoration") return ComponentKind::decoration;
  if (name == "other") return ComponentKind::other;
  throw ValidationError("unknown component kind: " + std::string(name));
}

std::int64_t box_area(const Placement& p) {
  return static_cast<std::int64_t>(p.width) * static_cast<std::int64_t>(p.height);
}

std::int64_t box_intersection_area(const Placement& a, const Placement& b) {
  const std::int64_t x0 = std::max(a.left, b.left);
  const std::int64_t x1 = std::min(static_cast<std::int64_t>(a.left) + a.width,
                                   static_cast<std::int64_t>(b.left) + b.width);
  const std::int64_t y0 = std::max(a.top, b.top);
  const std::int64_t y1 = std::min(static_cast<std::int64_t>(a.top) + a.height,
                                   static_cast<std::int64_t>(b.top) + b.height);
  if (x1 <= x0 || y1 <= y0) return 0;
  return (x1 - x0) * (y1 - y0);
}

double iou(const Placement& a, const Placement& b) {
  const std::int64_t inter = box_intersection_area(a, b);
  const std::int64_t uni = box_area(a) + box_area(b) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Placement clamp_to_canvas(Placement p, const Canvas& c) {
  p.left = std::clamp(p.left, 0, c.width - 1);
  p.top = std::clamp(p.top, 0, c.height - 1);
  p.width = std::clamp(p.width, 1, c.width - p.left);
  p.height = std::clamp(p.height, 1, c.height - p.top);
  return p;
}

void require_valid(const Canvas& c) {
  if (c.width < 1 || c.height < 1) {
    throw ValidationError("canvas dimensions must be >= 1");
  }
  if (std::max(c.width, c.height) > kMaxCanvasEdge) {
    throw ValidationError("canvas edge exceeds " + std::to_string(kMaxCanvasEdge));
  }
  if (c.scenario.empty()) {
    throw ValidationError("canvas scenario must be non-empty");
  }
}

void require_valid(const Placement& p) {
  if (p.width < 1 || p.height < 1) {
    throw ValidationError("placement width/height must be >= 1");
  }
  if (p.layer < 0) {
    throw ValidationError("placement layer must be >= 0");
  }
}

void require_valid_layout(std::span<const Placement> layout) {
  std::unordered_set<int> layers;
  for (const Placement& p : layout) {
    require_valid(p);
    if (!layers.insert(p.layer).second) {
      throw ValidationError("duplicate layer " + std::to_string(p.layer) + " in layout");
    }
  }
}

void require_valid(const Template& t) {
  require_valid(t.canvas);
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    if (t.components[i].index != static_cast<int>(i)) {
      throw ValidationError("template " + t.id + ": component indices must be dense 0..n-1");
    }
  }
  if (t.gold) {
    if (t.gold->size() != t.components.size()) {
      throw ValidationError("template " + t.id + ": gold length != component count");
    }
    require_valid_layout(*t.gold);
  }
}

}  // namespace layoutkit
