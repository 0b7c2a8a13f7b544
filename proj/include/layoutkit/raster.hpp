#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "layoutkit/geometry.hpp"
#include "layoutkit/image.hpp"

namespace layoutkit::raster {

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Grayscale primary-object mask over the canvas. Pixels with intensity >=
// threshold count as salient.
struct SaliencyMap {
  img::GrayImage map;
  std::uint8_t threshold = 128;

  int width() const { return map.width; }
  int height() const { return map.height; }
  bool salient(int x, int y) const { return map.at(x, y) >= threshold; }
};

struct OccupancyMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> covered;  // 0/1 per pixel

  bool at(int x, int y) const { return covered[static_cast<std::size_t>(y) * width + x] != 0; }
  std::int64_t popcount() const;
};

// Pixel set iff it lies in at least one (optionally filtered, clamped) box.
// The predicate receives the position of the placement in `layout`.
OccupancyMask rasterize_layout(std::span<const Placement> layout, const Canvas& canvas,
                               const std::function<bool(std::size_t)>& include = {});

// |salient AND occupied| / |salient|; 0 when the map has no salient pixels.
double occlusion_rate(std::span<const Placement> layout, const SaliencyMap& saliency,
                      const Canvas& canvas);

// |non-salient AND occupied| / |non-salient|; 0 when fully salient.
double utility_rate(std::span<const Placement> layout, const SaliencyMap& saliency,
                    const Canvas& canvas);

// Sobel gradient magnitudes of an 8-bit image, replicate-padded borders.
// Values lie in [0, 1020] (the response of a full black/white step edge).
inline constexpr double kMaxSobelMagnitude = 1020.0;
std::vector<double> sobel_magnitude(const img::GrayImage& image);

// Mean background gradient under text-kind elements, scaled so a maximal
// black/white edge scores 100. 0 when no text elements are present.
double unreadability(std::span<const Placement> layout, std::span<const ComponentKind> kinds,
                     const img::GrayImage& background, const Canvas& canvas);
double unreadability_from_field(std::span<const Placement> layout,
                                std::span<const ComponentKind> kinds,
                                std::span<const double> gradient, const Canvas& canvas);

enum class ScaleFilter { nearest, bilinear };

img::RgbaImage scale_image(const img::RgbaImage& src, int width, int height, ScaleFilter filter);

// Background (or white) plus components alpha-composited in ascending layer
// order, each scaled into its box. Asset references resolve against
// `asset_root`; unreadable assets render as flat placeholders.
img::RgbaImage composite(const Template& tpl, std::span<const Placement> layout,
                         const std::filesystem::path& asset_root,
                         ScaleFilter filter = ScaleFilter::bilinear);

std::vector<std::uint8_t> composite_preview_png(const Template& tpl,
                                                std::span<const Placement> layout,
                                                const std::filesystem::path& asset_root);

}  // namespace layoutkit::raster
