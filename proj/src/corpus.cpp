#include "layoutkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "layoutkit/image.hpp"
#include "layoutkit/rng.hpp"

namespace layoutkit::corpus {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& record, const std::string& pointer,
                              const std::string& message) {
  throw ValidationError("record '" + record + "': " + pointer + ": " + message);
}

const json& require_field(const json& j, const char* key, const std::string& record,
                          const std::string& pointer) {
  auto it = j.find(key);
  if (it == j.end()) field_error(record, pointer + "/" + key, "missing field");
  return *it;
}

std::string as_string(const json& j, const std::string& record, const std::string& pointer) {
  if (!j.is_string()) field_error(record, pointer, "expected string");
  return j.get<std::string>();
}

std::int64_t as_int(const json& j, const std::string& record, const std::string& pointer) {
  if (!j.is_number_integer()) field_error(record, pointer, "expected integer");
  const std::int64_t v = j.get<std::int64_t>();
  // Pixel geometry lives far below this; anything outside is a data bug.
  if (v < -1'000'000'000 || v > 1'000'000'000) {
    field_error(record, pointer, "integer out of range");
  }
  return v;
}

int round_half_away(double v) {
  v = std::clamp(v, -1.0e18, 1.0e18);
  return static_cast<int>(std::clamp<long long>(std::llround(v), -(1LL << 30), 1LL << 30));
}

bool element_too_small(std::int64_t w, std::int64_t h, std::int64_t cw, std::int64_t ch,
                       const NormalizeOptions& options) {
  if (options.filter_mode == FilterMode::area_fraction) {
    return static_cast<double>(w) * static_cast<double>(h) <
           options.filter_threshold * static_cast<double>(cw) * static_cast<double>(ch);
  }
  return static_cast<double>(w) < options.filter_threshold * static_cast<double>(cw) &&
         static_cast<double>(h) < options.filter_threshold * static_cast<double>(ch);
}

}  // namespace

RawTemplateRecord raw_from_json(const json& j) {
  RawTemplateRecord raw;
  raw.id = as_string(require_field(j, "id", "?", ""), "?", "/id");
  const json& canvas = require_field(j, "canvas", raw.id, "");
  raw.canvas_width = as_int(require_field(canvas, "width", raw.id, "/canvas"), raw.id,
                            "/canvas/width");
  raw.canvas_height = as_int(require_field(canvas, "height", raw.id, "/canvas"), raw.id,
                             "/canvas/height");
  raw.scenario = as_string(require_field(canvas, "scenario", raw.id, "/canvas"), raw.id,
                           "/canvas/scenario");
  if (auto it = canvas.find("background_path"); it != canvas.end() && !it->is_null()) {
    raw.background_path = as_string(*it, raw.id, "/canvas/background_path");
  }
  if (auto it = canvas.find("saliency_path"); it != canvas.end() && !it->is_null()) {
    raw.saliency_path = as_string(*it, raw.id, "/canvas/saliency_path");
  }
  const json& elements = require_field(j, "elements", raw.id, "");
  if (!elements.is_array()) field_error(raw.id, "/elements", "expected array");
  int index = 0;
  for (const json& e : elements) {
    const std::string pointer = "/elements/" + std::to_string(index);
    RawElement el;
    el.id = as_string(require_field(e, "id", raw.id, pointer), raw.id, pointer + "/id");
    el.kind = as_string(require_field(e, "kind", raw.id, pointer), raw.id, pointer + "/kind");
    el.image_path = as_string(require_field(e, "image_path", raw.id, pointer), raw.id,
                              pointer + "/image_path");
    if (auto it = e.find("caption"); it != e.end() && !it->is_null()) {
      el.caption = as_string(*it, raw.id, pointer + "/caption");
    }
    el.left = as_int(require_field(e, "left", raw.id, pointer), raw.id, pointer + "/left");
    el.top = as_int(require_field(e, "top", raw.id, pointer), raw.id, pointer + "/top");
    el.width = as_int(require_field(e, "width", raw.id, pointer), raw.id, pointer + "/width");
    el.height = as_int(require_field(e, "height", raw.id, pointer), raw.id, pointer + "/height");
    el.layer = as_int(require_field(e, "layer", raw.id, pointer), raw.id, pointer + "/layer");
    if (auto it = e.find("natural_size"); it != e.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2) {
        field_error(raw.id, pointer + "/natural_size", "expected [width, height]");
      }
      el.natural_size = {static_cast<int>(as_int((*it)[0], raw.id, pointer + "/natural_size/0")),
                         static_cast<int>(as_int((*it)[1], raw.id, pointer + "/natural_size/1"))};
    }
    if (el.width < 1 || el.height < 1) {
      field_error(raw.id, pointer, "element width/height must be >= 1");
    }
    raw.elements.push_back(std::move(el));
    ++index;
  }
  return raw;
}

Template normalize(const RawTemplateRecord& raw, const NormalizeOptions& options) {
  if (raw.canvas_width < 1 || raw.canvas_height < 1) {
    throw ValidationError("record '" + raw.id + "': canvas dimensions must be >= 1");
  }
  if (raw.scenario.empty()) {
    throw ValidationError("record '" + raw.id + "': scenario must be non-empty");
  }

  // Filter in original pixel space.
  std::vector<const RawElement*> kept;
  for (const RawElement& el : raw.elements) {
    if (!element_too_small(el.width, el.height, raw.canvas_width, raw.canvas_height, options)) {
      kept.push_back(&el);
    }
  }
  if (kept.empty()) {
    throw EmptyTemplate("record '" + raw.id + "': every element fell below the size filter");
  }

  const std::int64_t max_dim = std::max(raw.canvas_width, raw.canvas_height);
  const double scale =
      max_dim > options.max_edge ? static_cast<double>(options.max_edge) / max_dim : 1.0;

  Canvas canvas;
  canvas.width = std::clamp(round_half_away(raw.canvas_width * scale), 1, options.max_edge);
  canvas.height = std::clamp(round_half_away(raw.canvas_height * scale), 1, options.max_edge);
  canvas.scenario = raw.scenario;
  canvas.background = raw.background_path;

  struct Scaled {
    const RawElement* el;
    Placement p;
  };
  std::vector<Scaled> scaled;
  scaled.reserve(kept.size());
  for (const RawElement* el : kept) {
    Placement p;
    p.left = round_half_away(el->left * scale);
    p.top = round_half_away(el->top * scale);
    p.width = std::max(1, round_half_away(el->width * scale));
    p.height = std::max(1, round_half_away(el->height * scale));
    scaled.push_back({el, p});
  }

  // Rounding can nudge borderline elements back under the threshold; filter
  // once more in the scaled space so normalize is a fixed point.
  std::erase_if(scaled, [&](const Scaled& s) {
    return element_too_small(s.p.width, s.p.height, canvas.width, canvas.height, options);
  });
  if (scaled.empty()) {
    throw EmptyTemplate("record '" + raw.id + "': every element fell below the size filter");
  }

  // Re-pack layers to 0..n-1 preserving stacking order, ties by element order.
  std::vector<std::size_t> order(scaled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scaled[a].el->layer < scaled[b].el->layer;
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    scaled[order[rank]].p.layer = static_cast<int>(rank);
  }

  Template tpl;
  tpl.id = raw.id;
  tpl.canvas = std::move(canvas);
  tpl.saliency = raw.saliency_path;
  tpl.gold.emplace();
  int index = 0;
  for (const Scaled& s : scaled) {
    Component c;
    c.id = s.el->id.empty() ? raw.id + "_e" + std::to_string(index) : s.el->id;
    c.index = index;
    c.image = s.el->image_path;
    c.kind = component_kind_from_string(s.el->kind);
    c.caption = s.el->caption;
    if (s.el->natural_size) {
      c.natural_width = std::max(1, s.el->natural_size->first);
      c.natural_height = std::max(1, s.el->natural_size->second);
    } else {
      c.natural_width = static_cast<int>(std::min<std::int64_t>(s.el->width, 1 << 20));
      c.natural_height = static_cast<int>(std::min<std::int64_t>(s.el->height, 1 << 20));
    }
    tpl.components.push_back(std::move(c));
    tpl.gold->push_back(s.p);
    ++index;
  }
  return tpl;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

json entry_to_json(const CorpusEntry& entry) {
  const Template& t = entry.tpl;
  json components = json::array();
  for (const Component& c : t.components) {
    components.push_back({
        {"id", c.id},
        {"index", c.index},
        {"image", c.image},
        {"kind", std::string(to_string(c.kind))},
        {"caption", c.caption ? json(*c.caption) : json(nullptr)},
        {"natural_size", json::array({c.natural_width, c.natural_height})},
    });
  }
  json gold(nullptr);
  if (t.gold) {
    gold = json::array();
    for (const Placement& p : *t.gold) {
      gold.push_back({{"left", p.left},
                      {"top", p.top},
                      {"width", p.width},
                      {"height", p.height},
                      {"layer", p.layer}});
    }
  }
  return json{
      {"id", t.id},
      {"split", entry.split},
      {"canvas",
       {{"width", t.canvas.width},
        {"height", t.canvas.height},
        {"scenario", t.canvas.scenario},
        {"background", t.canvas.background ? json(*t.canvas.background) : json(nullptr)}}},
      {"components", std::move(components)},
      {"gold", std::move(gold)},
      {"saliency", t.saliency ? json(*t.saliency) : json(nullptr)},
  };
}

CorpusEntry entry_from_json(const json& j) {
  CorpusEntry entry;
  Template& t = entry.tpl;
  t.id = as_string(require_field(j, "id", "?", ""), "?", "/id");
  entry.split = j.value("split", std::string("train"));
  const json& canvas = require_field(j, "canvas", t.id, "");
  t.canvas.width = static_cast<int>(as_int(require_field(canvas, "width", t.id, "/canvas"), t.id,
                                           "/canvas/width"));
  t.canvas.height = static_cast<int>(as_int(require_field(canvas, "height", t.id, "/canvas"),
                                            t.id, "/canvas/height"));
  t.canvas.scenario = as_string(require_field(canvas, "scenario", t.id, "/canvas"), t.id,
                                "/canvas/scenario");
  if (auto it = canvas.find("background"); it != canvas.end() && !it->is_null()) {
    t.canvas.background = as_string(*it, t.id, "/canvas/background");
  }
  const json& components = require_field(j, "components", t.id, "");
  if (!components.is_array()) field_error(t.id, "/components", "expected array");
  for (const json& cj : components) {
    const std::string pointer = "/components/" + std::to_string(t.components.size());
    Component c;
    c.id = as_string(require_field(cj, "id", t.id, pointer), t.id, pointer + "/id");
    c.index = static_cast<int>(as_int(require_field(cj, "index", t.id, pointer), t.id,
                                      pointer + "/index"));
    c.image = as_string(require_field(cj, "image", t.id, pointer), t.id, pointer + "/image");
    c.kind = component_kind_from_string(
        as_string(require_field(cj, "kind", t.id, pointer), t.id, pointer + "/kind"));
    if (auto it = cj.find("caption"); it != cj.end() && !it->is_null()) {
      c.caption = as_string(*it, t.id, pointer + "/caption");
    }
    const json& nat = require_field(cj, "natural_size", t.id, pointer);
    if (!nat.is_array() || nat.size() != 2) {
      field_error(t.id, pointer + "/natural_size", "expected [width, height]");
    }
    c.natural_width = static_cast<int>(as_int(nat[0], t.id, pointer + "/natural_size/0"));
    c.natural_height = static_cast<int>(as_int(nat[1], t.id, pointer + "/natural_size/1"));
    t.components.push_back(std::move(c));
  }
  if (auto it = j.find("gold"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) field_error(t.id, "/gold", "expected array");
    t.gold.emplace();
    for (const json& pj : *it) {
      const std::string pointer = "/gold/" + std::to_string(t.gold->size());
      Placement p;
      p.left = static_cast<int>(as_int(require_field(pj, "left", t.id, pointer), t.id,
                                       pointer + "/left"));
      p.top = static_cast<int>(as_int(require_field(pj, "top", t.id, pointer), t.id,
                                      pointer + "/top"));
      p.width = static_cast<int>(as_int(require_field(pj, "width", t.id, pointer), t.id,
                                        pointer + "/width"));
      p.height = static_cast<int>(as_int(require_field(pj, "height", t.id, pointer), t.id,
                                         pointer + "/height"));
      p.layer = static_cast<int>(as_int(require_field(pj, "layer", t.id, pointer), t.id,
                                        pointer + "/layer"));
      t.gold->push_back(p);
    }
  }
  if (auto it = j.find("saliency"); it != j.end() && !it->is_null()) {
    t.saliency = as_string(*it, t.id, "/saliency");
  }
  return entry;
}

json manifest_to_json(const CorpusManifest& m) {
  json splits = json::object();
  for (const auto& [name, count] : m.split_counts) splits[name] = count;
  json out{
      {"name", m.name},
      {"schema_version", m.schema_version},
      {"splits", std::move(splits)},
      {"provenance", m.provenance},
  };
  if (!m.extra.is_null()) out["extra"] = m.extra;
  return out;
}

CorpusManifest manifest_from_json(const json& j) {
  CorpusManifest m;
  m.name = j.value("name", std::string());
  m.schema_version = j.value("schema_version", 0);
  m.provenance = j.value("provenance", std::string());
  if (auto it = j.find("splits"); it != j.end() && it->is_object()) {
    for (const auto& [name, count] : it->items()) {
      m.split_counts[name] = count.get<int>();
    }
  }
  if (auto it = j.find("extra"); it != j.end()) m.extra = *it;
  return m;
}

std::vector<const Template*> Corpus::split(const std::string& name) const {
  std::vector<const Template*> out;
  for (const CorpusEntry& entry : entries) {
    if (entry.split == name) out.push_back(&entry.tpl);
  }
  return out;
}

void save_corpus(const Corpus& corpus) {
  std::filesystem::create_directories(corpus.root);
  {
    std::ofstream out(corpus.root / "corpus.jsonl", std::ios::trunc);
    if (!out) throw Error("cannot write " + (corpus.root / "corpus.jsonl").string());
    for (const CorpusEntry& entry : corpus.entries) {
      out << entry_to_json(entry).dump() << '\n';
    }
  }
  std::ofstream out(corpus.root / "manifest.json", std::ios::trunc);
  if (!out) throw Error("cannot write " + (corpus.root / "manifest.json").string());
  out << manifest_to_json(corpus.manifest).dump(2) << '\n';
}

Corpus load_corpus(const std::filesystem::path& root) {
  Corpus corpus;
  corpus.root = root;
  {
    std::ifstream in(root / "manifest.json");
    if (!in) throw ValidationError("not a corpus directory (missing manifest.json): " + root.string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ValidationError("manifest.json: " + std::string(e.what()));
    }
    corpus.manifest = manifest_from_json(j);
  }
  if (corpus.manifest.schema_version != kSchemaVersion) {
    throw ValidationError("unsupported corpus schema_version " +
                          std::to_string(corpus.manifest.schema_version));
  }
  std::ifstream in(root / "corpus.jsonl");
  if (!in) throw ValidationError("missing corpus.jsonl under " + root.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ValidationError("corpus.jsonl line " + std::to_string(line_no) + ": invalid JSON");
    }
    corpus.entries.push_back(entry_from_json(j));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// synthetic corpus
// ---------------------------------------------------------------------------

SynthProfile synth_profile_from_string(std::string_view name) {
  if (name == "blank_canvas") return SynthProfile::blank_canvas;
  if (name == "poster_background") return SynthProfile::poster_background;
  throw ValidationError("unknown synth profile: " + std::string(name));
}

std::string_view to_string(SynthProfile profile) {
  return profile == SynthProfile::blank_canvas ? "blank_canvas" : "poster_background";
}

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kPalette[] = {
    {0x2D, 0x5D, 0x8C}, {0xC7, 0x4B, 0x3C}, {0xE8, 0xB9, 0x4A}, {0x4C, 0x8C, 0x5C},
    {0x7A, 0x4C, 0x8C}, {0xEF, 0xE5, 0xD8}, {0x31, 0x31, 0x38}, {0xD8, 0x8C, 0x5C},
};

constexpr const char* kBlankScenarios[] = {
    "Instagram post", "book cover", "brochure", "menu", "greeting card", "digital ad",
};
constexpr const char* kPosterScenarios[] = {
    "poster", "event poster", "sale poster", "movie poster",
};

constexpr const char* kImageCaptions[] = {
    "a photo of mountains at dusk",      "a product shot on a plain table",
    "a close-up of fresh ingredients",   "a city skyline at night",
    "a portrait in warm light",          "an abstract paper texture",
};
constexpr const char* kTextCaptions[] = {
    "headline text in a bold serif",   "a short tagline in small caps",
    "body copy with three lines",      "a discount figure in large digits",
    "the event date and venue line",
};
constexpr const char* kLogoCaptions[] = {
    "a round monochrome logo", "a company wordmark", "a small badge emblem",
};
constexpr const char* kDecorationCaptions[] = {
    "a thin divider flourish", "a corner ribbon ornament", "a dotted accent strip",
};

struct CanvasPreset {
  int width, height;
};
constexpr CanvasPreset kCanvasPresets[] = {
    {1080, 1080}, {1280, 720}, {800, 1200}, {640, 640}, {1920, 1080},
    {100, 80},    {128, 128},  {96, 128},   {720, 960},
};

int weighted_component_count(Rng& rng) {
  constexpr int kWeights[8] = {10, 18, 20, 18, 12, 10, 7, 5};
  int total = 0;
  for (int w : kWeights) total += w;
  int pick = rng.below(total);
  for (int i = 0; i < 8; ++i) {
    pick -= kWeights[i];
    if (pick < 0) return i + 1;
  }
  return 8;
}

const char* pick_caption(Rng& rng, ComponentKind kind) {
  switch (kind) {
    case ComponentKind::text:
      return kTextCaptions[rng.below(static_cast<int>(std::size(kTextCaptions)))];
    case ComponentKind::logo:
      return kLogoCaptions[rng.below(static_cast<int>(std::size(kLogoCaptions)))];
    case ComponentKind::decoration:
      return kDecorationCaptions[rng.below(static_cast<int>(std::size(kDecorationCaptions)))];
    default:
      return kImageCaptions[rng.below(static_cast<int>(std::size(kImageCaptions)))];
  }
}

ComponentKind pick_kind(Rng& rng, SynthProfile profile, int index) {
  if (profile == SynthProfile::poster_background) {
    // Poster canvases carry text, labels, and logos.
    const int roll = rng.below(10);
    if (roll < 5) return ComponentKind::text;
    if (roll < 7) return ComponentKind::logo;
    if (roll < 9) return ComponentKind::image;
    return ComponentKind::decoration;
  }
  if (index == 0) return ComponentKind::image;  // templates start from a hero image
  const int roll = rng.below(10);
  if (roll < 4) return ComponentKind::text;
  if (roll < 7) return ComponentKind::image;
  if (roll < 8) return ComponentKind::logo;
  if (roll < 9) return ComponentKind::decoration;
  return ComponentKind::other;
}

img::RgbaImage render_component_asset(Rng& rng, ComponentKind kind, int width, int height) {
  const Rgb base = kPalette[rng.below(static_cast<int>(std::size(kPalette)))];
  const Rgb accent = kPalette[rng.below(static_cast<int>(std::size(kPalette)))];
  img::RgbaImage image = img::RgbaImage::filled(width, height, base.r, base.g, base.b);
  switch (kind) {
    case ComponentKind::text: {
      // Light card with dark "text" stripes.
      image = img::RgbaImage::filled(width, height, 246, 244, 240);
      const int line_height = std::max(2, height / 8);
      for (int y = line_height; y + line_height / 2 < height; y += 2 * line_height) {
        const int line_width = width * rng.range(55, 95) / 100;
        for (int yy = y; yy < std::min(height, y + line_height / 2 + 1); ++yy) {
          for (int x = width / 16; x < std::min(width, width / 16 + line_width); ++x) {
            std::uint8_t* px = image.at(x, yy);
            px[0] = px[1] = px[2] = 38;
          }
        }
      }
      break;
    }
    case ComponentKind::logo: {
      image = img::RgbaImage::filled(width, height, 0, 0, 0, 0);
      const double cx = (width - 1) / 2.0;
      const double cy = (height - 1) / 2.0;
      const double radius = std::min(width, height) * 0.42;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const double d = std::hypot(x - cx, y - cy);
          if (d <= radius) {
            std::uint8_t* px = image.at(x, y);
            px[0] = accent.r;
            px[1] = accent.g;
            px[2] = accent.b;
            px[3] = 255;
          }
        }
      }
      break;
    }
    case ComponentKind::decoration: {
      image = img::RgbaImage::filled(width, height, accent.r, accent.g, accent.b, 170);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          if (((x + y) / std::max(2, width / 10)) % 2 == 0) {
            image.at(x, y)[3] = 60;
          }
        }
      }
      break;
    }
    case ComponentKind::other: {
      const int cell = std::max(2, std::min(width, height) / 6);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          if (((x / cell) + (y / cell)) % 2 == 0) {
            std::uint8_t* px = image.at(x, y);
            px[0] = accent.r;
            px[1] = accent.g;
            px[2] = accent.b;
          }
        }
      }
      break;
    }
    default: {
      // Vertical gradient from base to accent.
      for (int y = 0; y < height; ++y) {
        const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
        const std::uint8_t r = static_cast<std::uint8_t>(base.r + (accent.r - base.r) * t);
        const std::uint8_t g = static_cast<std::uint8_t>(base.g + (accent.g - base.g) * t);
        const std::uint8_t b = static_cast<std::uint8_t>(base.b + (accent.b - base.b) * t);
        for (int x = 0; x < width; ++x) {
          std::uint8_t* px = image.at(x, y);
          px[0] = r;
          px[1] = g;
          px[2] = b;
        }
      }
      break;
    }
  }
  return image;
}

struct Blob {
  double cx, cy, sigma;
};

std::vector<Blob> pick_blobs(Rng& rng, int width, int height) {
  const int count = rng.range(2, 3);
  std::vector<Blob> blobs;
  for (int i = 0; i < count; ++i) {
    Blob b;
    b.cx = width * (0.2 + 0.6 * rng.uniform01());
    b.cy = height * (0.2 + 0.6 * rng.uniform01());
    b.sigma = std::min(width, height) * (0.08 + 0.10 * rng.uniform01());
    blobs.push_back(b);
  }
  return blobs;
}

img::GrayImage render_saliency(const std::vector<Blob>& blobs, int width, int height) {
  img::GrayImage map = img::GrayImage::filled(width, height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double best = 0.0;
      for (const Blob& b : blobs) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
        best = std::max(best, v);
      }
      map.at(x, y) = static_cast<std::uint8_t>(std::lround(best * 255.0));
    }
  }
  return map;
}

img::RgbaImage render_poster_background(Rng& rng, const std::vector<Blob>& blobs, int width,
                                        int height) {
  const Rgb top = kPalette[rng.below(static_cast<int>(std::size(kPalette)))];
  const Rgb bottom = kPalette[rng.below(static_cast<int>(std::size(kPalette)))];
  const Rgb object = kPalette[rng.below(static_cast<int>(std::size(kPalette)))];
  img::RgbaImage image = img::RgbaImage::filled(width, height, top.r, top.g, top.b);
  for (int y = 0; y < height; ++y) {
    const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    for (int x = 0; x < width; ++x) {
      std::uint8_t* px = image.at(x, y);
      px[0] = static_cast<std::uint8_t>(top.r + (bottom.r - top.r) * t);
      px[1] = static_cast<std::uint8_t>(top.g + (bottom.g - top.g) * t);
      px[2] = static_cast<std::uint8_t>(top.b + (bottom.b - top.b) * t);
    }
  }
  // Primary objects show up as hard-edged disks, giving the background
  // real gradients for the unreadability metric.
  for (const Blob& b : blobs) {
    const double radius = 1.1774 * b.sigma;  // matches the saliency threshold contour
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (std::hypot(x - b.cx, y - b.cy) <= radius) {
          std::uint8_t* px = image.at(x, y);
          px[0] = object.r;
          px[1] = object.g;
          px[2] = object.b;
        }
      }
    }
  }
  return image;
}

std::string template_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%05d", index);
  return buf;
}

}  // namespace

Corpus generate_synthetic(const std::filesystem::path& out_dir, const SynthOptions& options) {
  if (options.count < 1) throw ValidationError("synthetic corpus count must be >= 1");
  if (options.val_fraction < 0.0 || options.val_fraction > 1.0) {
    throw ValidationError("val_fraction must lie in [0, 1]");
  }

  const bool poster = options.profile == SynthProfile::poster_background;
  std::filesystem::create_directories(out_dir / "assets");
  if (poster) std::filesystem::create_directories(out_dir / "saliency");

  Corpus corpus;
  corpus.root = out_dir;

  for (int i = 0; i < options.count; ++i) {
    Rng rng = Rng::stream(options.seed, static_cast<std::uint64_t>(i));
    const std::string id = template_id(i);

    const CanvasPreset preset =
        kCanvasPresets[rng.below(static_cast<int>(std::size(kCanvasPresets)))];
    const int n = weighted_component_count(rng);

    RawTemplateRecord raw;
    raw.id = id;
    raw.canvas_width = preset.width;
    raw.canvas_height = preset.height;
    raw.scenario = poster
                       ? kPosterScenarios[rng.below(static_cast<int>(std::size(kPosterScenarios)))]
                       : kBlankScenarios[rng.below(static_cast<int>(std::size(kBlankScenarios)))];
    if (poster) {
      raw.background_path = "assets/" + id + "_bg.png";
      raw.saliency_path = "saliency/" + id + ".png";
    }

    // Layer order is a random permutation of 0..n-1.
    std::vector<int> layers(static_cast<std::size_t>(n));
    std::iota(layers.begin(), layers.end(), 0);
    for (int k = n - 1; k > 0; --k) {
      std::swap(layers[static_cast<std::size_t>(k)],
                layers[static_cast<std::size_t>(rng.below(k + 1))]);
    }

    struct AssetPlan {
      ComponentKind kind;
      int width, height;
    };
    std::vector<AssetPlan> assets;
    for (int k = 0; k < n; ++k) {
      RawElement el;
      const ComponentKind kind = pick_kind(rng, options.profile, k);
      el.id = id + "_c" + std::to_string(k);
      el.kind = std::string(to_string(kind));
      el.image_path = "assets/" + id + "_c" + std::to_string(k) + ".png";
      el.caption = pick_caption(rng, kind);
      // Sizes stay comfortably above the 5% area filter.
      const double wf = 0.28 + 0.47 * rng.uniform01();
      const double hf = 0.28 + 0.47 * rng.uniform01();
      el.width = std::max<std::int64_t>(1, std::llround(preset.width * wf));
      el.height = std::max<std::int64_t>(1, std::llround(preset.height * hf));
      el.left = rng.below(static_cast<int>(preset.width - el.width + 1));
      el.top = rng.below(static_cast<int>(preset.height - el.height + 1));
      el.layer = layers[static_cast<std::size_t>(k)];

      const int nat_edge = rng.range(32, 128);
      const double aspect = static_cast<double>(el.width) / static_cast<double>(el.height);
      int nat_w, nat_h;
      if (aspect >= 1.0) {
        nat_w = nat_edge;
        nat_h = std::max(8, static_cast<int>(std::lround(nat_edge / aspect)));
      } else {
        nat_h = nat_edge;
        nat_w = std::max(8, static_cast<int>(std::lround(nat_edge * aspect)));
      }
      el.natural_size = {nat_w, nat_h};
      raw.elements.push_back(std::move(el));
      assets.push_back({kind, nat_w, nat_h});
    }

    CorpusEntry entry;
    entry.tpl = normalize(raw);
    const double vf = options.val_fraction;
    entry.split = std::floor((i + 1) * vf) > std::floor(i * vf) ? "val" : "train";

    for (int k = 0; k < n; ++k) {
      const AssetPlan& plan = assets[static_cast<std::size_t>(k)];
      img::save_png(out_dir / "assets" / (id + "_c" + std::to_string(k) + ".png"),
                    render_component_asset(rng, plan.kind, plan.width, plan.height));
    }
    if (poster) {
      const std::vector<Blob> blobs =
          pick_blobs(rng, entry.tpl.canvas.width, entry.tpl.canvas.height);
      img::save_png(out_dir / "saliency" / (id + ".png"),
                    render_saliency(blobs, entry.tpl.canvas.width, entry.tpl.canvas.height));
      img::save_png(out_dir / "assets" / (id + "_bg.png"),
                    render_poster_background(rng, blobs, entry.tpl.canvas.width,
                                             entry.tpl.canvas.height));
    }

    corpus.entries.push_back(std::move(entry));
  }

  CorpusManifest manifest;
  manifest.name = "synthetic-" + std::string(to_string(options.profile)) + "-s" +
                  std::to_string(options.seed) + "-n" + std::to_string(options.count);
  manifest.provenance = "generated";
  for (const CorpusEntry& entry : corpus.entries) {
    manifest.split_counts[entry.split] += 1;
  }
  manifest.extra = {
      {"generator", "layoutkit synth"},
      {"seed", options.seed},
      {"count", options.count},
      {"profile", std::string(to_string(options.profile))},
      {"val_fraction", options.val_fraction},
  };
  corpus.manifest = std::move(manifest);
  save_corpus(corpus);
  return corpus;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

std::variant<CorpusManifest, std::vector<SchemaViolation>> validate_corpus(
    const std::filesystem::path& root) {
  std::vector<SchemaViolation> violations;
  Corpus corpus;
  try {
    corpus = load_corpus(root);
  } catch (const Error& e) {
    violations.push_back({"", "", e.what()});
    return violations;
  }

  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const CorpusEntry& entry = corpus.entries[i];
    const Template& t = entry.tpl;
    auto add = [&](const std::string& pointer, const std::string& message) {
      violations.push_back({t.id.empty() ? "record " + std::to_string(i) : t.id, pointer, message});
    };
    try {
      require_valid(t);
    } catch (const ValidationError& e) {
      add("", e.what());
    }
    if (entry.split != "train" && entry.split != "val") {
      add("/split", "unknown split '" + entry.split + "'");
    }
    if (!t.gold) {
      add("/gold", "missing gold layout");
    } else {
      for (std::size_t k = 0; k < t.gold->size(); ++k) {
        const Placement& p = (*t.gold)[k];
        if (box_intersection_area(
                p, Placement{0, 0, t.canvas.width, t.canvas.height, 0}) == 0) {
          add("/gold/" + std::to_string(k), "box does not intersect the canvas");
        }
      }
    }
    for (const Component& c : t.components) {
      if (!std::filesystem::exists(root / c.image)) {
        add("/components/" + std::to_string(c.index) + "/image",
            "missing asset file " + c.image);
      }
    }
    if (t.canvas.background && !std::filesystem::exists(root / *t.canvas.background)) {
      add("/canvas/background", "missing background file " + *t.canvas.background);
    }
    if (t.saliency) {
      const std::filesystem::path path = root / *t.saliency;
      if (!std::filesystem::exists(path)) {
        add("/saliency", "missing saliency file " + *t.saliency);
      } else {
        try {
          const img::GrayImage map = img::load_gray(path);
          if (map.width != t.canvas.width || map.height != t.canvas.height) {
            add("/saliency", "saliency dimensions do not match the canvas");
          }
        } catch (const Error& e) {
          add("/saliency", e.what());
        }
      }
    }
    counts[entry.split] += 1;
  }

  for (const auto& [split, expected] : corpus.manifest.split_counts) {
    auto it = counts.find(split);
    const int actual = it == counts.end() ? 0 : it->second;
    if (actual != expected) {
      violations.push_back({"", "/manifest/splits/" + split,
                            "manifest says " + std::to_string(expected) + " but found " +
                                std::to_string(actual)});
    }
  }
  for (const auto& [split, actual] : counts) {
    if (corpus.manifest.split_counts.find(split) == corpus.manifest.split_counts.end()) {
      violations.push_back({"", "/manifest/splits/" + split,
                            "split present in corpus but missing from manifest (" +
                                std::to_string(actual) + " records)"});
    }
  }

  if (!violations.empty()) return violations;
  return corpus.manifest;
}

}  // namespace layoutkit::corpus
