#include "layoutkit/raster.hpp"

#include <algorithm>
#include <cmath>

namespace layoutkit::raster {

namespace {

void check_dims(int w, int h, const Canvas& canvas, const char* what) {
  if (w != canvas.width || h != canvas.height) {
    throw DimensionMismatch(std::string(what) + " is " + std::to_string(w) + "x" +
                            std::to_string(h) + " but canvas is " + std::to_string(canvas.width) +
                            "x" + std::to_string(canvas.height));
  }
}

}  // namespace

std::int64_t OccupancyMask::popcount() const {
  std::int64_t n = 0;
  for (std::uint8_t v : covered) n += v;
  return n;
}

OccupancyMask rasterize_layout(std::span<const Placement> layout, const Canvas& canvas,
                               const std::function<bool(std::size_t)>& include) {
  OccupancyMask mask;
  mask.width = canvas.width;
  mask.height = canvas.height;
  mask.covered.assign(static_cast<std::size_t>(canvas.width) * canvas.height, 0);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (include && !include(i)) continue;
    const Placement p = clamp_to_canvas(layout[i], canvas);
    for (int y = p.top; y < p.top + p.height; ++y) {
      std::uint8_t* row = mask.covered.data() + static_cast<std::size_t>(y) * canvas.width;
      std::fill(row + p.left, row + p.left + p.width, std::uint8_t{1});
    }
  }
  return mask;
}

double occlusion_rate(std::span<const Placement> layout, const SaliencyMap& saliency,
                      const Canvas& canvas) {
  check_dims(saliency.width(), saliency.height(), canvas, "saliency map");
  const OccupancyMask mask = rasterize_layout(layout, canvas);
  std::int64_t salient = 0;
  std::int64_t covered = 0;
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      if (saliency.salient(x, y)) {
        ++salient;
        if (mask.at(x, y)) ++covered;
      }
    }
  }
  if (salient == 0) return 0.0;
  return static_cast<double>(covered) / static_cast<double>(salient);
}

double utility_rate(std::span<const Placement> layout, const SaliencyMap& saliency,
                    const Canvas& canvas) {
  check_dims(saliency.width(), saliency.height(), canvas, "saliency map");
  const OccupancyMask mask = rasterize_layout(layout, canvas);
  std::int64_t non_salient = 0;
  std::int64_t covered = 0;
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      if (!saliency.salient(x, y)) {
        ++non_salient;
        if (mask.at(x, y)) ++covered;
      }
    }
  }
  if (non_salient == 0) return 0.0;
  return static_cast<double>(covered) / static_cast<double>(non_salient);
}

std::vector<double> sobel_magnitude(const img::GrayImage& image) {
  const int w = image.width;
  const int h = image.height;
  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  auto sample = [&](int x, int y) -> int {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return image.at(x, y);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gx = -sample(x - 1, y - 1) - 2 * sample(x - 1, y) - sample(x - 1, y + 1) +
                     sample(x + 1, y - 1) + 2 * sample(x + 1, y) + sample(x + 1, y + 1);
      const int gy = -sample(x - 1, y - 1) - 2 * sample(x, y - 1) - sample(x + 1, y - 1) +
                     sample(x - 1, y + 1) + 2 * sample(x, y + 1) + sample(x + 1, y + 1);
      out[static_cast<std::size_t>(y) * w + x] =
          std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
    }
  }
  return out;
}

double unreadability_from_field(std::span<const Placement> layout,
                                std::span<const ComponentKind> kinds,
                                std::span<const double> gradient, const Canvas& canvas) {
  if (gradient.size() != static_cast<std::size_t>(canvas.width) * canvas.height) {
    throw DimensionMismatch("gradient field does not match canvas");
  }
  const OccupancyMask mask = rasterize_layout(layout, canvas, [&](std::size_t i) {
    return i < kinds.size() && kinds[i] == ComponentKind::text;
  });
  double sum = 0.0;
  std::int64_t count = 0;
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      if (mask.at(x, y)) {
        sum += gradient[static_cast<std::size_t>(y) * canvas.width + x];
        ++count;
      }
    }
  }
  if (count == 0) return 0.0;
  return (sum / static_cast<double>(count)) / kMaxSobelMagnitude * 100.0;
}

double unreadability(std::span<const Placement> layout, std::span<const ComponentKind> kinds,
                     const img::GrayImage& background, const Canvas& canvas) {
  check_dims(background.width, background.height, canvas, "background");
  const std::vector<double> gradient = sobel_magnitude(background);
  return unreadability_from_field(layout, kinds, gradient, canvas);
}

img::RgbaImage scale_image(const img::RgbaImage& src, int width, int height, ScaleFilter filter) {
  img::RgbaImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(static_cast<std::size_t>(width) * height * 4);
  if (src.width < 1 || src.height < 1) return out;

  if (filter == ScaleFilter::nearest || (src.width == width && src.height == height)) {
    for (int y = 0; y < height; ++y) {
      const int sy = std::min(src.height - 1,
                              static_cast<int>((static_cast<std::int64_t>(y) * src.height) / height));
      for (int x = 0; x < width; ++x) {
        const int sx = std::min(src.width - 1,
                                static_cast<int>((static_cast<std::int64_t>(x) * src.width) / width));
        std::copy_n(src.at(sx, sy), 4, out.at(x, y));
      }
    }
    return out;
  }

  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) * src.height / height - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, src.height - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = std::clamp(fy - y0, 0.0, 1.0);
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) * src.width / width - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, src.width - 1);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      std::uint8_t* dst = out.at(x, y);
      for (int c = 0; c < 4; ++c) {
        const double v00 = src.at(x0, y0)[c];
        const double v10 = src.at(x1, y0)[c];
        const double v01 = src.at(x0, y1)[c];
        const double v11 = src.at(x1, y1)[c];
        const double v = (v00 * (1 - wx) + v10 * wx) * (1 - wy) + (v01 * (1 - wx) + v11 * wx) * wy;
        dst[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

namespace {

void blit(img::RgbaImage& dst, const img::RgbaImage& src, int left, int top) {
  for (int y = 0; y < src.height; ++y) {
    const int dy = top + y;
    if (dy < 0 || dy >= dst.height) continue;
    for (int x = 0; x < src.width; ++x) {
      const int dx = left + x;
      if (dx < 0 || dx >= dst.width) continue;
      const std::uint8_t* s = src.at(x, y);
      std::uint8_t* d = dst.at(dx, dy);
      const int a = s[3];
      if (a == 0) continue;
      // Integer source-over with round-to-nearest.
      for (int c = 0; c < 3; ++c) {
        d[c] = static_cast<std::uint8_t>((s[c] * a + d[c] * (255 - a) + 127) / 255);
      }
      d[3] = static_cast<std::uint8_t>(a + d[3] * (255 - a) / 255);
    }
  }
}

img::RgbaImage placeholder_asset(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::text: return img::RgbaImage::filled(8, 8, 40, 40, 40);
    case ComponentKind::logo: return img::RgbaImage::filled(8, 8, 180, 60, 60);
    case ComponentKind::decoration: return img::RgbaImage::filled(8, 8, 120, 160, 220);
    default: return img::RgbaImage::filled(8, 8, 140, 140, 140);
  }
}

}  // namespace

img::RgbaImage composite(const Template& tpl, std::span<const Placement> layout,
                         const std::filesystem::path& asset_root, ScaleFilter filter) {
  img::RgbaImage canvas_img =
      img::RgbaImage::filled(tpl.canvas.width, tpl.canvas.height, 255, 255, 255);
  if (tpl.canvas.background) {
    try {
      const img::RgbaImage bg = img::load_rgba(asset_root / *tpl.canvas.background);
      const img::RgbaImage scaled = scale_image(bg, tpl.canvas.width, tpl.canvas.height, filter);
      blit(canvas_img, scaled, 0, 0);
    } catch (const Error&) {
      // Missing background renders as white.
    }
  }

  std::vector<std::size_t> order(layout.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layout[a].layer < layout[b].layer;
  });

  for (std::size_t i : order) {
    const Placement p = clamp_to_canvas(layout[i], tpl.canvas);
    img::RgbaImage asset;
    bool loaded = false;
    if (i < tpl.components.size() && !tpl.components[i].image.empty()) {
      try {
        asset = img::load_rgba(asset_root / tpl.components[i].image);
        loaded = true;
      } catch (const Error&) {
      }
    }
    if (!loaded) {
      asset = placeholder_asset(i < tpl.components.size() ? tpl.components[i].kind
                                                          : ComponentKind::other);
    }
    const img::RgbaImage scaled = scale_image(asset, p.width, p.height, filter);
    blit(canvas_img, scaled, p.left, p.top);
  }
  return canvas_img;
}

std::vector<std::uint8_t> composite_preview_png(const Template& tpl,
                                                std::span<const Placement> layout,
                                                const std::filesystem::path& asset_root) {
  return img::encode_png(composite(tpl, layout, asset_root, ScaleFilter::bilinear));
}

}  // namespace layoutkit::raster
