#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutkit/geometry.hpp"

namespace layoutkit::dsl {

// Canonical grammar (see docs/layout-dsl.md):
//   layout := rule ("\n" rule)* | ""
//   rule   := ".component_" K " { left: " L "px; top: " T "px; width: " W
//             "px; height: " H "px; layer: " Z "; }"
// with K equal to the 1-based rule position. serialize() emits exactly this;
// parse_strict() accepts exactly this and nothing else.

class SyntaxError : public ValidationError {
 public:
  SyntaxError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnrecoverableParse : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

std::string serialize(std::span<const Placement> layout);
std::string serialize(const std::vector<Placement>& layout);
std::string serialize_rule(int selector_number, const Placement& p);

std::vector<Placement> parse_strict(std::string_view text);

// One repair action taken by the lenient parser, e.g.
// ("component_2", "left", "rounded 10.4 to 10").
struct RepairRecord {
  std::string selector;
  std::string property;
  std::string action;

  friend bool operator==(const RepairRecord&, const RepairRecord&) = default;
};

struct ParseDiagnostics {
  std::vector<RepairRecord> repaired;
  int dropped_text = 0;  // non-whitespace bytes ignored as non-CSS

  bool canonical() const { return repaired.empty() && dropped_text == 0; }
};

struct LenientOptions {
  bool allow_fallback = true;  // full-canvas fallback for unparseable components
};

struct LenientResult {
  std::vector<Placement> placements;  // always exactly n_components entries
  ParseDiagnostics diagnostics;
};

// Total recovery of a layout from imperfect model text. Ladder: CSS-like
// rule spans anywhere in the text; a JSON array of box objects; bare
// property clusters in prose; per-component full-canvas fallback. Output is
// clamped to the canvas and always satisfies layout invariants.
// Throws UnrecoverableParse only when nothing is extractable and fallback
// is disabled.
LenientResult parse_lenient(std::string_view text, int n_components, const Canvas& canvas,
                            const LenientOptions& options = {});

}  // namespace layoutkit::dsl
