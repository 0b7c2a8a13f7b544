#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutkit/geometry.hpp"

namespace layoutkit::corpus {

inline constexpr int kSchemaVersion = 1;

class EmptyTemplate : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// One element of a design document in its original pixel space.
struct RawElement {
  std::string id;
  std::string kind;
  std::string image_path;
  std::optional<std::string> caption;
  std::int64_t left = 0;
  std::int64_t top = 0;
  std::int64_t width = 1;
  std::int64_t height = 1;
  std::int64_t layer = 0;
  std::optional<std::pair<int, int>> natural_size;  // source asset pixels
};

struct RawTemplateRecord {
  std::string id;
  std::int64_t canvas_width = 1;
  std::int64_t canvas_height = 1;
  std::string scenario;
  std::optional<std::string> background_path;
  std::optional<std::string> saliency_path;
  std::vector<RawElement> elements;
};

RawTemplateRecord raw_from_json(const nlohmann::json& j);

enum class FilterMode {
  area_fraction,   // element area / canvas area < threshold
  per_dimension,   // width < t*cw AND height < t*ch
};

struct NormalizeOptions {
  double filter_threshold = 0.05;
  int max_edge = kMaxCanvasEdge;
  FilterMode filter_mode = FilterMode::area_fraction;
};

// Drops too-small elements (original pixel space), resizes so the longest
// canvas edge is <= max_edge, re-packs layers to 0..n-1 preserving stacking
// order (ties by element order), and re-indexes components densely.
// Idempotent. Throws EmptyTemplate when every element is filtered out.
Template normalize(const RawTemplateRecord& raw, const NormalizeOptions& options = {});

struct CorpusManifest {
  std::string name;
  int schema_version = kSchemaVersion;
  std::map<std::string, int> split_counts;  // e.g. {"train": 160, "val": 40}
  std::string provenance;
  nlohmann::json extra;  // generator parameters etc.
};

struct CorpusEntry {
  Template tpl;
  std::string split = "train";
};

struct Corpus {
  std::filesystem::path root;
  CorpusManifest manifest;
  std::vector<CorpusEntry> entries;

  std::vector<const Template*> split(const std::string& name) const;
};

nlohmann::json entry_to_json(const CorpusEntry& entry);
CorpusEntry entry_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const CorpusManifest& m);
CorpusManifest manifest_from_json(const nlohmann::json& j);

void save_corpus(const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& root);

enum class SynthProfile { blank_canvas, poster_background };

SynthProfile synth_profile_from_string(std::string_view name);
std::string_view to_string(SynthProfile profile);

struct SynthOptions {
  std::uint64_t seed = 0;
  int count = 1;
  SynthProfile profile = SynthProfile::blank_canvas;
  double val_fraction = 0.2;
};

// Deterministic pseudo-random corpus: templates, PNG assets, and (for the
// poster profile) backgrounds plus saliency maps, written under `out_dir`.
Corpus generate_synthetic(const std::filesystem::path& out_dir, const SynthOptions& options);

struct SchemaViolation {
  std::string record_id;
  std::string pointer;  // JSON pointer into the record
  std::string message;
};

std::variant<CorpusManifest, std::vector<SchemaViolation>> validate_corpus(
    const std::filesystem::path& root);

}  // namespace layoutkit::corpus
