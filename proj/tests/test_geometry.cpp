#include <doctest.h>

#include "layoutkit/geometry.hpp"
#include "layoutkit/rng.hpp"

namespace {

using namespace layoutkit;

// Brute-force oracle: rasterize both boxes and count shared pixels.
std::int64_t rasterized_intersection(const Placement& a, const Placement& b) {
  const int x0 = std::min(a.left, b.left);
  const int x1 = std::max(a.left + a.width, b.left + b.width);
  const int y0 = std::min(a.top, b.top);
  const int y1 = std::max(a.top + a.height, b.top + b.height);
  std::int64_t count = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = x >= a.left && x < a.left + a.width && y >= a.top && y < a.top + a.height;
      const bool in_b = x >= b.left && x < b.left + b.width && y >= b.top && y < b.top + b.height;
      if (in_a && in_b) ++count;
    }
  }
  return count;
}

Placement random_box(Rng& rng) {
  Placement p;
  p.left = rng.range(-10, 120);
  p.top = rng.range(-10, 120);
  p.width = rng.range(1, 64);
  p.height = rng.range(1, 64);
  p.layer = rng.range(0, 7);
  return p;
}

}  // namespace

TEST_CASE("box intersection matches the stated examples") {
  const Placement a{0, 0, 2, 2, 0};
  const Placement b{0, 0, 2, 2, 1};
  CHECK(box_intersection_area(a, b) == 4);
  CHECK(box_intersection_area(Placement{0, 0, 2, 2, 0}, Placement{10, 10, 2, 2, 1}) == 0);
  CHECK(box_intersection_area(Placement{0, 0, 2, 2, 0}, Placement{1, 1, 2, 2, 1}) == 1);
}

TEST_CASE("iou matches the stated examples") {
  const Placement a{3, 4, 5, 6, 0};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(Placement{0, 0, 2, 2, 0}, Placement{10, 10, 2, 2, 1}) == 0.0);
  CHECK(iou(Placement{0, 0, 2, 2, 0}, Placement{1, 1, 2, 2, 1}) ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("analytic intersection equals the rasterized pixel count") {
  Rng rng(20240601);
  for (int trial = 0; trial < 500; ++trial) {
    const Placement a = random_box(rng);
    const Placement b = random_box(rng);
    CHECK(box_intersection_area(a, b) == rasterized_intersection(a, b));
  }
}

TEST_CASE("iou is symmetric and iou(a,a) is exactly one") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const Placement a = random_box(rng);
    const Placement b = random_box(rng);
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("clamp_to_canvas follows the stated examples") {
  const Canvas canvas{128, 128, "poster", std::nullopt};
  CHECK(clamp_to_canvas(Placement{-5, 0, 10, 10, 0}, canvas) == Placement{0, 0, 10, 10, 0});
  CHECK(clamp_to_canvas(Placement{120, 0, 20, 10, 0}, canvas) == Placement{120, 0, 8, 10, 0});
  const Placement inside{30, 40, 50, 60, 2};
  CHECK(clamp_to_canvas(inside, canvas) == inside);
}

TEST_CASE("clamp_to_canvas is idempotent") {
  const Canvas canvas{100, 80, "menu", std::nullopt};
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    Placement p;
    p.left = rng.range(-200, 200);
    p.top = rng.range(-200, 200);
    p.width = rng.range(1, 300);
    p.height = rng.range(1, 300);
    const Placement once = clamp_to_canvas(p, canvas);
    CHECK(clamp_to_canvas(once, canvas) == once);
    CHECK(once.left >= 0);
    CHECK(once.top >= 0);
    CHECK(once.left + once.width <= canvas.width);
    CHECK(once.top + once.height <= canvas.height);
    CHECK(once.width >= 1);
    CHECK(once.height >= 1);
  }
}

TEST_CASE("validation rejects broken domain values") {
  CHECK_THROWS_AS(require_valid(Canvas{0, 10, "poster", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(require_valid(Canvas{200, 10, "poster", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(require_valid(Canvas{10, 10, "", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(require_valid(Placement{0, 0, 0, 5, 0}), ValidationError);
  const std::vector<Placement> dup = {{0, 0, 1, 1, 2}, {3, 3, 1, 1, 2}};
  CHECK_THROWS_AS(require_valid_layout(dup), ValidationError);
  CHECK(component_kind_from_string("text") == ComponentKind::text);
  CHECK_THROWS_AS(component_kind_from_string("sticker"), ValidationError);
}
