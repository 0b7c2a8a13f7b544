#include "layoutkit/image.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>

namespace layoutkit::img {

namespace {

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  std::span<const std::uint8_t> data) {
  append_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_begin = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, out.data() + crc_begin, static_cast<uInt>(out.size() - crc_begin)));
  append_u32(out, crc);
}

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::vector<std::uint8_t> encode_png_impl(int width, int height, int channels,
                                          const std::uint8_t* pixels) {
  if (width < 1 || height < 1) throw ValidationError("png encode: empty image");

  const std::size_t row = static_cast<std::size_t>(width) * channels;
  std::vector<std::uint8_t> raw;
  raw.reserve((row + 1) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: None
    raw.insert(raw.end(), pixels + y * row, pixels + (y + 1) * row);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error("png encode: deflate failed");
  }
  compressed.resize(bound);

  std::vector<std::uint8_t> out(kPngMagic, kPngMagic + 8);
  std::vector<std::uint8_t> ihdr;
  append_u32(ihdr, static_cast<std::uint32_t>(width));
  append_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);                                             // bit depth
  ihdr.push_back(channels == 1 ? 0 : (channels == 3 ? 2 : 6));   // color type
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", {});
  return out;
}

int png_channels(int color_type) {
  switch (color_type) {
    case 0: return 1;
    case 2: return 3;
    case 6: return 4;
    default: return -1;
  }
}

std::uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

DecodedPng decode_png_impl(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngMagic, 8) != 0) {
    throw ValidationError("png decode: bad magic");
  }
  std::size_t pos = 8;
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> idat;
  bool seen_ihdr = false;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = read_u32(bytes.data() + pos);
    if (pos + 12 + len > bytes.size()) throw ValidationError("png decode: truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw ValidationError("png decode: bad IHDR");
      width = static_cast<int>(read_u32(data));
      height = static_cast<int>(read_u32(data + 4));
      const int bit_depth = data[8];
      channels = png_channels(data[9]);
      if (bit_depth != 8 || channels < 0) {
        throw ValidationError("png decode: only 8-bit gray/rgb/rgba supported");
      }
      if (data[12] != 0) throw ValidationError("png decode: interlace not supported");
      seen_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!seen_ihdr || width < 1 || height < 1) throw ValidationError("png decode: missing IHDR");
  if (static_cast<std::int64_t>(width) * height > 64LL * 1024 * 1024) {
    throw ValidationError("png decode: image too large");
  }

  const std::size_t row = static_cast<std::size_t>(width) * channels;
  std::vector<std::uint8_t> raw((row + 1) * static_cast<std::size_t>(height));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    throw ValidationError("png decode: inflate failed");
  }

  DecodedPng out;
  out.width = width;
  out.height = height;
  out.channels = channels;
  out.pixels.resize(row * static_cast<std::size_t>(height));
  const int bpp = channels;
  for (int y = 0; y < height; ++y) {
    const std::uint8_t filter = raw[(row + 1) * static_cast<std::size_t>(y)];
    const std::uint8_t* src = raw.data() + (row + 1) * static_cast<std::size_t>(y) + 1;
    std::uint8_t* dst = out.pixels.data() + row * static_cast<std::size_t>(y);
    const std::uint8_t* prev = y > 0 ? dst - row : nullptr;
    for (std::size_t x = 0; x < row; ++x) {
      const int a = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
      const int b = prev ? prev[x] : 0;
      const int c = (prev && x >= static_cast<std::size_t>(bpp)) ? prev[x - bpp] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw ValidationError("png decode: bad filter type");
      }
      dst[x] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  return out;
}

}  // namespace

GrayImage GrayImage::filled(int w, int h, std::uint8_t value) {
  GrayImage out;
  out.width = w;
  out.height = h;
  out.pixels.assign(static_cast<std::size_t>(w) * h, value);
  return out;
}

RgbaImage RgbaImage::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                            std::uint8_t a) {
  RgbaImage out;
  out.width = w;
  out.height = h;
  out.pixels.resize(static_cast<std::size_t>(w) * h * 4);
  for (std::size_t i = 0; i < out.pixels.size(); i += 4) {
    out.pixels[i] = r;
    out.pixels[i + 1] = g;
    out.pixels[i + 2] = b;
    out.pixels[i + 3] = a;
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return encode_png_impl(image.width, image.height, 1, image.pixels.data());
}

std::vector<std::uint8_t> encode_png(const RgbaImage& image) {
  return encode_png_impl(image.width, image.height, 4, image.pixels.data());
}

RgbaImage decode_png_rgba(std::span<const std::uint8_t> bytes) {
  const DecodedPng d = decode_png_impl(bytes);
  RgbaImage out;
  out.width = d.width;
  out.height = d.height;
  out.pixels.resize(static_cast<std::size_t>(d.width) * d.height * 4);
  const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* src = d.pixels.data() + i * d.channels;
    std::uint8_t* dst = out.pixels.data() + i * 4;
    if (d.channels == 1) {
      dst[0] = dst[1] = dst[2] = src[0];
      dst[3] = 255;
    } else if (d.channels == 3) {
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
      dst[3] = 255;
    } else {
      std::memcpy(dst, src, 4);
    }
  }
  return out;
}

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
  const DecodedPng d = decode_png_impl(bytes);
  GrayImage out;
  out.width = d.width;
  out.height = d.height;
  out.pixels.resize(static_cast<std::size_t>(d.width) * d.height);
  const std::size_t n = out.pixels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* src = d.pixels.data() + i * d.channels;
    if (d.channels == 1) {
      out.pixels[i] = src[0];
    } else {
      // Rec.601 integer luma.
      out.pixels[i] =
          static_cast<std::uint8_t>((299 * src[0] + 587 * src[1] + 114 * src[2] + 500) / 1000);
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                       "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto integer = [&]() -> int {
    skip_space();
    int v = 0;
    bool any = false;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000) throw ValidationError("pgm decode: value out of range");
      ++pos;
      any = true;
    }
    if (!any) throw ValidationError("pgm decode: expected integer");
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ValidationError("pgm decode: bad magic");
  }
  const bool binary = bytes[1] == '5';
  pos = 2;
  const int width = integer();
  const int height = integer();
  const int maxval = integer();
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
    throw ValidationError("pgm decode: unsupported header");
  }
  GrayImage out;
  out.width = width;
  out.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  out.pixels.resize(n);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (pos + n > bytes.size()) throw ValidationError("pgm decode: truncated data");
    std::memcpy(out.pixels.data(), bytes.data() + pos, n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.pixels[i] = static_cast<std::uint8_t>(integer() * 255 / maxval);
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

GrayImage load_gray(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pgm(bytes);
  return decode_png_gray(bytes);
}

RgbaImage load_rgba(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) {
    const GrayImage gray = decode_pgm(bytes);
    RgbaImage out;
    out.width = gray.width;
    out.height = gray.height;
    out.pixels.resize(static_cast<std::size_t>(gray.width) * gray.height * 4);
    for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
      out.pixels[i * 4] = out.pixels[i * 4 + 1] = out.pixels[i * 4 + 2] = gray.pixels[i];
      out.pixels[i * 4 + 3] = 255;
    }
    return out;
  }
  return decode_png_rgba(bytes);
}

void save_png(const std::filesystem::path& path, const GrayImage& image) {
  const auto bytes = encode_png(image);
  write_file(path, bytes);
}

void save_png(const std::filesystem::path& path, const RgbaImage& image) {
  const auto bytes = encode_png(image);
  write_file(path, bytes);
}

}  // namespace layoutkit::img
