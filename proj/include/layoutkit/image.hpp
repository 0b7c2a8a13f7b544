#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "layoutkit/errors.hpp"

namespace layoutkit::img {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width*height

  static GrayImage filled(int w, int h, std::uint8_t value);
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct RgbaImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGBA, width*height*4

  static RgbaImage filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                          std::uint8_t a = 255);
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4;
  }
  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4;
  }
};

// 8-bit PNG, color type 0 (gray) / 2 (rgb) / 6 (rgba), no interlace.
std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const RgbaImage& image);
RgbaImage decode_png_rgba(std::span<const std::uint8_t> bytes);
GrayImage decode_png_gray(std::span<const std::uint8_t> bytes);  // rgb collapses via Rec.601 luma

// Binary (P5) and ASCII (P2) PGM, maxval <= 255.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

// Format is sniffed from the file's magic bytes (PNG or PGM).
GrayImage load_gray(const std::filesystem::path& path);
RgbaImage load_rgba(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const GrayImage& image);
void save_png(const std::filesystem::path& path, const RgbaImage& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace layoutkit::img
