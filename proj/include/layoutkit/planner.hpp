#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "layoutkit/geometry.hpp"
#include "layoutkit/raster.hpp"

namespace layoutkit::planner {

struct MoveWeights {
  double translate = 0.6;
  double resize = 0.3;
  double swap_layers = 0.1;
};

struct PlannerConfig {
  std::uint64_t seed = 0;
  int iterations = 5000;
  double initial_temperature = 0.2;
  double cooling = 0.998;  // temperature factor per step, in (0, 1)
  double w_occ = 1.0;
  double w_uti = 1.0;
  double w_rea = 0.5;
  MoveWeights moves;
};

void require_valid(const PlannerConfig& config);

// Penalty scales folded into ObjectiveBreakdown::out_of_bounds / ::overlap.
inline constexpr double kOutOfBoundsWeight = 10.0;
inline constexpr double kOverlapWeight = 1.0;

// Smallest box edge the planners will propose.
inline constexpr int kMinBoxEdge = 4;

struct ObjectiveBreakdown {
  double occlusion = 0.0;      // fraction in [0, 1]
  double utility = 0.0;        // fraction in [0, 1]
  double unreadability = 0.0;  // score in [0, 100]
  double out_of_bounds = 0.0;  // weighted penalty
  double overlap = 0.0;        // weighted text-over-text penalty
  double total = 0.0;          // w_occ*occ - w_uti*uti + w_rea*unread/100 + penalties
};

// total and the weighted-sum invariant for an arbitrary layout. Saliency and
// background gradient are optional; absent terms contribute zero.
ObjectiveBreakdown evaluate_objective(std::span<const Placement> layout,
                                      std::span<const ComponentKind> kinds,
                                      const raster::SaliencyMap* saliency,
                                      const std::vector<double>* background_gradient,
                                      const Canvas& canvas, const PlannerConfig& config);

// Deterministic heuristic for blank canvases: the largest component becomes
// a full-canvas backdrop at layer 0; the rest flow over a 12-column grid at
// natural relative sizes, center-aligned, layered by descending area.
std::vector<Placement> plan_blank(const Template& tpl, const PlannerConfig& config = {});

struct AnnealTrace {
  std::vector<Placement> initial_placements;
  double initial_total = 0.0;
  std::vector<double> best_totals;     // per iteration, non-increasing
  std::vector<double> current_totals;  // accepted-state totals
};

struct PosterPlan {
  std::vector<Placement> placements;
  ObjectiveBreakdown objective;
};

// Simulated annealing over translate/resize/swap-layer moves, seeded from a
// least-salient-rows tiling. `background` feeds the unreadability term and
// may be null. Deterministic given config.seed.
PosterPlan plan_poster(const Template& tpl, const raster::SaliencyMap& saliency,
                       const img::GrayImage* background, const PlannerConfig& config = {},
                       AnnealTrace* trace = nullptr);

// Uniform-random placements under the same legality rules as the annealer's
// move set; the reference baseline the annealer is measured against.
std::vector<Placement> plan_random(const Template& tpl, const PlannerConfig& config = {});

}  // namespace layoutkit::planner
