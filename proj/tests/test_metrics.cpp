#include <doctest.h>

#include "layoutkit/metrics.hpp"
#include "layoutkit/rng.hpp"

namespace {

using namespace layoutkit;

// Brute-force binning oracle: the first bin b with clamp(v) < (b+1)*extent/bins,
// compared in exact integer arithmetic.
int oracle_bin(int value, int extent, int bins) {
  const std::int64_t v = std::clamp<std::int64_t>(value, 0, extent);
  for (int b = 0; b < bins; ++b) {
    if (v * bins < static_cast<std::int64_t>(b + 1) * extent) return b;
  }
  return bins - 1;
}

}  // namespace

TEST_CASE("miou handles identity, disjoint pairs, and mismatches") {
  const std::vector<Placement> gold = {{0, 0, 10, 10, 0}, {20, 20, 10, 10, 1}};
  CHECK(metrics::miou(gold, gold) == 1.0);

  const std::vector<Placement> half = {{0, 0, 10, 10, 0}, {90, 90, 10, 10, 1}};
  CHECK(metrics::miou(half, gold) == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<Placement> short_pred = {{0, 0, 10, 10, 0}};
  CHECK_THROWS_AS(metrics::miou(short_pred, gold), metrics::LengthMismatch);
  CHECK_THROWS_AS(metrics::miou({}, {}), metrics::LengthMismatch);
}

TEST_CASE("miou is invariant under consistent permutation") {
  Rng rng(0x3D);
  std::vector<Placement> pred, gold;
  for (int k = 0; k < 6; ++k) {
    pred.push_back({rng.below(100), rng.below(100), rng.range(1, 30), rng.range(1, 30), k});
    gold.push_back({rng.below(100), rng.below(100), rng.range(1, 30), rng.range(1, 30), k});
  }
  const double base = metrics::miou(pred, gold);
  std::vector<Placement> pred_perm, gold_perm;
  const int perm[6] = {4, 2, 0, 5, 1, 3};
  for (int k : perm) {
    pred_perm.push_back(pred[static_cast<std::size_t>(k)]);
    gold_perm.push_back(gold[static_cast<std::size_t>(k)]);
  }
  CHECK(metrics::miou(pred_perm, gold_perm) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("quantized accuracy follows the documented examples") {
  CHECK(metrics::quantized_accuracy(4, 5, 128, 64) == 1);  // both in bin 2
  CHECK(metrics::quantized_accuracy(17, 17, 128, 64) == 1);
  CHECK(metrics::quantize_bin(128, 128, 64) == 63);  // boundary clamps into the last bin
  CHECK(metrics::quantized_accuracy(128, 127, 128, 64) == 1);
  CHECK(metrics::quantized_accuracy(3, 5, 128, 64) == 0);
  CHECK_THROWS_AS(metrics::quantized_accuracy(1, 1, 0, 64), ValidationError);
}

TEST_CASE("quantized accuracy equals the brute-force oracle") {
  Rng rng(0xB1A5);
  for (int trial = 0; trial < 3000; ++trial) {
    const int extent = rng.range(1, 256);
    const int bins = rng.range(1, 96);
    const int pred = rng.range(-10, extent + 10);
    const int gold = rng.range(-10, extent + 10);
    const int expected = oracle_bin(pred, extent, bins) == oracle_bin(gold, extent, bins) ? 1 : 0;
    CHECK(metrics::quantized_accuracy(pred, gold, extent, bins) == expected);
    CHECK(metrics::quantize_bin(pred, extent, bins) == oracle_bin(pred, extent, bins));
  }
}

TEST_CASE("one-pixel bins reduce to exact match on clamped values") {
  Rng rng(0xE1);
  for (int trial = 0; trial < 500; ++trial) {
    const int extent = rng.range(1, 128);
    const int pred = rng.range(-5, extent + 5);
    const int gold = rng.range(-5, extent + 5);
    // With bins == extent each bin is one pixel wide; the boundary value
    // extent folds into the last pixel's bin.
    const int expected =
        std::min(std::clamp(pred, 0, extent), extent - 1) ==
                std::min(std::clamp(gold, 0, extent), extent - 1)
            ? 1
            : 0;
    CHECK(metrics::quantized_accuracy(pred, gold, extent, extent) == expected);
  }
}

TEST_CASE("aggregate_geo is macro over templates; micro weighs components") {
  const Canvas canvas{128, 128, "poster", std::nullopt};

  // Template A: one component, exact match.
  const std::vector<Placement> a_gold = {{0, 0, 10, 10, 0}};
  const metrics::GeoMetricsRecord a = metrics::evaluate_template("A", a_gold, a_gold, canvas);
  CHECK(a.template_miou == 1.0);

  // Template B: three disjoint components.
  const std::vector<Placement> b_gold = {{0, 0, 8, 8, 0}, {20, 20, 8, 8, 1}, {40, 40, 8, 8, 2}};
  const std::vector<Placement> b_pred = {{100, 100, 8, 8, 0}, {60, 60, 8, 8, 1},
                                         {80, 80, 8, 8, 2}};
  const metrics::GeoMetricsRecord b = metrics::evaluate_template("B", b_pred, b_gold, canvas);
  CHECK(b.template_miou == 0.0);

  const std::vector<metrics::GeoMetricsRecord> records = {a, b};
  CHECK(metrics::aggregate_geo(records).miou == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(metrics::aggregate_geo_micro(records).miou == doctest::Approx(25.0).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::aggregate_geo({}), metrics::EmptyInput);
}

TEST_CASE("single perfect template aggregates to all-100") {
  const Canvas canvas{100, 80, "menu", std::nullopt};
  const std::vector<Placement> gold = {{3, 4, 30, 20, 0}, {50, 40, 20, 20, 1}};
  const metrics::GeoMetricsRecord record = metrics::evaluate_template("t", gold, gold, canvas);
  const metrics::GeoSummary summary = metrics::aggregate_geo(std::vector{record});
  CHECK(summary.miou == 100.0);
  CHECK(summary.left == 100.0);
  CHECK(summary.top == 100.0);
  CHECK(summary.width == 100.0);
  CHECK(summary.height == 100.0);
  CHECK(metrics::format_pct(summary.miou) == "100.00");
  CHECK(metrics::format_pct(43.749) == "43.75");
}

TEST_CASE("evaluate_template bins left/width against width and top/height against height") {
  const Canvas canvas{128, 64, "banner", std::nullopt};
  // 1 px apart on a 128-wide axis: same 2 px bin. On the 64-high axis each
  // bin is exactly 1 px, so a 1 px difference must miss.
  const std::vector<Placement> gold = {{4, 4, 10, 10, 0}};
  const std::vector<Placement> pred = {{5, 5, 10, 10, 0}};
  const metrics::GeoMetricsRecord record = metrics::evaluate_template("t", pred, gold, canvas);
  CHECK(record.per_component[0].acc_left == 1);
  CHECK(record.per_component[0].acc_top == 0);
}
