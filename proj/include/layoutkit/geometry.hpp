#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutkit/errors.hpp"

namespace layoutkit {

// Longest canvas edge after corpus normalization.
inline constexpr int kMaxCanvasEdge = 128;

// Target surface a layout is placed on, in the resized (<=128) integer space.
struct Canvas {
  int width = 1;
  int height = 1;
  std::string scenario;                   // e.g. "poster", "Instagram post"
  std::optional<std::string> background;  // image reference; absent for blank canvases

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

enum class ComponentKind { image, text, logo, decoration, other };

std::string_view to_string(ComponentKind kind);
ComponentKind component_kind_from_string(std::string_view name);  // throws ValidationError

// One visual asset to be positioned. Text is pre-rendered to an image.
struct Component {
  std::string id;
  int index = 0;  // 0-based position in the input sequence
  std::string image;
  ComponentKind kind = ComponentKind::image;
  std::optional<std::string> caption;  // pre-computed description, for text-only baselines
  int natural_width = 1;               // source asset pixels, not canvas pixels
  int natural_height = 1;

  friend bool operator==(const Component&, const Component&) = default;
};

// Axis-aligned half-open pixel box [left, left+width) x [top, top+height)
// plus stacking layer. Higher layers draw over lower ones.
struct Placement {
  int left = 0;
  int top = 0;
  int width = 1;
  int height = 1;
  int layer = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Template {
  std::string id;
  Canvas canvas;
  std::vector<Component> components;
  std::optional<std::vector<Placement>> gold;  // aligned by component index
  std::optional<std::string> saliency;         // grayscale map reference

  friend bool operator==(const Template&, const Template&) = default;
};

std::int64_t box_area(const Placement& p);

// Area of the geometric intersection of two boxes; 0 when disjoint.
std::int64_t box_intersection_area(const Placement& a, const Placement& b);

// intersection / (area(a) + area(b) - intersection). Always in [0, 1].
double iou(const Placement& a, const Placement& b);

// left/top clamped into [0, dim-1], width/height clipped so the box stays
// inside the canvas and remains >= 1. layer is untouched. Idempotent.
Placement clamp_to_canvas(Placement p, const Canvas& c);

// Invariant checks used at ingestion and by tests. Throw ValidationError.
void require_valid(const Canvas& c);
void require_valid(const Placement& p);
void require_valid_layout(std::span<const Placement> layout);  // also checks pairwise-distinct layers
void require_valid(const Template& t);

}  // namespace layoutkit
