#include "layoutkit/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

namespace layoutkit::dsl {

namespace {

constexpr int kPropCount = 5;
constexpr std::string_view kPropNames[kPropCount] = {"left", "top", "width", "height", "layer"};
enum Prop { kLeft = 0, kTop = 1, kWidth = 2, kHeight = 3, kLayer = 4 };

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

int round_half_away(double v) {
  v = std::clamp(v, -1.0e9, 1.0e9);
  return static_cast<int>(std::llround(v));
}

std::string format_number(double v, bool is_float) {
  if (!is_float) return std::to_string(static_cast<long long>(v));
  std::string s = std::to_string(v);  // fixed six decimals
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : ValidationError("syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string serialize_rule(int selector_number, const Placement& p) {
  std::string out;
  out.reserve(80);
  out += ".component_";
  out += std::to_string(selector_number);
  out += " { left: ";
  out += std::to_string(p.left);
  out += "px; top: ";
  out += std::to_string(p.top);
  out += "px; width: ";
  out += std::to_string(p.width);
  out += "px; height: ";
  out += std::to_string(p.height);
  out += "px; layer: ";
  out += std::to_string(p.layer);
  out += "; }";
  return out;
}

std::string serialize(std::span<const Placement> layout) {
  std::string out;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i > 0) out += '\n';
    out += serialize_rule(static_cast<int>(i) + 1, layout[i]);
  }
  return out;
}

std::string serialize(const std::vector<Placement>& layout) {
  return serialize(std::span<const Placement>(layout));
}

// ---------------------------------------------------------------------------
// strict parser
// ---------------------------------------------------------------------------

namespace {

class StrictCursor {
 public:
  explicit StrictCursor(std::string_view s) : s_(s) {}

  bool eof() const { return pos_ >= s_.size(); }
  int line() const { return line_; }
  int column() const { return col_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(line_, col_, message);
  }

  char take() {
    if (eof()) fail("unexpected end of input");
    const char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(std::string_view literal) {
    for (char want : literal) {
      if (eof()) fail("unexpected end of input, expected '" + std::string(literal) + "'");
      const char got = peek();
      if (got != want) {
        fail("expected '" + std::string(literal) + "'");
      }
      take();
    }
  }

  // Canonical integer: optional '-', then digits with no leading zeros.
  long long integer(bool allow_negative) {
    bool negative = false;
    if (peek() == '-') {
      if (!allow_negative) fail("negative value not allowed here");
      take();
      negative = true;
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digit");
    const char first = take();
    long long magnitude = first - '0';
    int digits = 1;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      if (first == '0') fail("leading zeros are not canonical");
      if (++digits > 10) fail("integer out of range");
      magnitude = magnitude * 10 + (take() - '0');
    }
    if (negative && magnitude == 0) fail("negative zero is not canonical");
    if (negative ? magnitude > 2147483648LL : magnitude > 2147483647LL) {
      fail("integer out of range");
    }
    return negative ? -magnitude : magnitude;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Placement> parse_strict(std::string_view text) {
  std::vector<Placement> out;
  if (text.empty()) return out;

  StrictCursor cur(text);
  std::set<int> layers;
  int expected = 1;
  for (;;) {
    cur.expect(".component_");
    const int rule_line = cur.line();
    const int rule_col = cur.column();
    const long long k = cur.integer(false);
    if (k != expected) {
      throw SyntaxError(rule_line, rule_col,
                        "expected selector .component_" + std::to_string(expected));
    }
    Placement p;
    cur.expect(" { left: ");
    p.left = static_cast<int>(cur.integer(true));
    cur.expect("px; top: ");
    p.top = static_cast<int>(cur.integer(true));
    cur.expect("px; width: ");
    const int width_line = cur.line();
    const int width_col = cur.column();
    p.width = static_cast<int>(cur.integer(false));
    if (p.width < 1) throw SyntaxError(width_line, width_col, "width must be >= 1");
    cur.expect("px; height: ");
    const int height_line = cur.line();
    const int height_col = cur.column();
    p.height = static_cast<int>(cur.integer(false));
    if (p.height < 1) throw SyntaxError(height_line, height_col, "height must be >= 1");
    cur.expect("px; layer: ");
    const int layer_line = cur.line();
    const int layer_col = cur.column();
    p.layer = static_cast<int>(cur.integer(false));
    if (!layers.insert(p.layer).second) {
      throw SyntaxError(layer_line, layer_col, "duplicate layer " + std::to_string(p.layer));
    }
    cur.expect("; }");
    out.push_back(p);
    ++expected;

    if (cur.eof()) break;
    cur.expect("\n");
    if (cur.eof()) cur.fail("expected rule after newline");
  }
  return out;
}

// ---------------------------------------------------------------------------
// lenient parser
// ---------------------------------------------------------------------------

namespace {

struct NumberToken {
  bool ok = false;
  double value = 0.0;
  bool is_float = false;
  bool has_px = false;
  bool has_other_suffix = false;
  bool out_of_range = false;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the token (including suffix)
  std::string raw;
};

struct RawRule {
  std::optional<int> number;  // 1-based selector when present
  std::optional<NumberToken> props[kPropCount];
  std::vector<RepairRecord> repairs;  // rule-scoped repairs, selector filled in later
  int order = 0;
  bool css_rule = false;  // found via a selector, so px suffixes are expected
};

class LenientScanner {
 public:
  LenientScanner(std::string_view text, ParseDiagnostics& diag)
      : text_(text), diag_(diag), consumed_(text.size(), 0) {}

  std::string_view text() const { return text_; }

  void mark(std::size_t begin, std::size_t end) {
    end = std::min(end, text_.size());
    for (std::size_t i = begin; i < end; ++i) consumed_[i] = 1;
  }

  // Non-whitespace bytes never consumed by a rule span. Prose and markdown
  // fences around the CSS both land here.
  int dropped_count() const {
    int dropped = 0;
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (!consumed_[i] && !is_ws(text_[i])) ++dropped;
    }
    return dropped;
  }

  ParseDiagnostics& diag() { return diag_; }

  // Parses a number token at `pos` (after optional whitespace). Returns a
  // token with ok=false when there is no number there.
  NumberToken number_at(std::size_t pos) const {
    NumberToken tok;
    std::size_t i = pos;
    // Quotes around values ("10px") are a common JSON-ish deviation.
    while (i < text_.size() &&
           (text_[i] == ' ' || text_[i] == '\t' || text_[i] == '"' || text_[i] == '\'')) {
      ++i;
    }
    tok.begin = i;
    double sign = 1.0;
    if (i < text_.size() && (text_[i] == '-' || text_[i] == '+')) {
      if (text_[i] == '-') sign = -1.0;
      ++i;
    }
    double value = 0.0;
    int digits = 0;
    bool overflow = false;
    while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
      if (digits < 12) {
        value = value * 10.0 + (text_[i] - '0');
      } else {
        overflow = true;
      }
      ++digits;
      ++i;
    }
    bool any_digit = digits > 0;
    if (i < text_.size() && text_[i] == '.') {
      ++i;
      double scale = 0.1;
      int frac_digits = 0;
      while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
        if (frac_digits < 9) value += (text_[i] - '0') * scale;
        scale *= 0.1;
        ++frac_digits;
        ++i;
      }
      if (frac_digits > 0 || any_digit) tok.is_float = true;
      any_digit = any_digit || frac_digits > 0;
    }
    if (!any_digit) return tok;  // ok stays false
    std::size_t suffix_begin = i;
    while (i < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[i])) || text_[i] == '%')) {
      ++i;
    }
    const std::string_view suffix = text_.substr(suffix_begin, i - suffix_begin);
    if (suffix == "px") {
      tok.has_px = true;
    } else if (!suffix.empty()) {
      tok.has_other_suffix = true;
    }
    tok.ok = true;
    tok.value = sign * (overflow ? 1.0e9 : value);
    tok.out_of_range = overflow;
    tok.end = i;
    tok.raw = std::string(text_.substr(tok.begin, tok.end - tok.begin));
    return tok;
  }

 private:
  std::string_view text_;
  ParseDiagnostics& diag_;
  std::vector<std::uint8_t> consumed_;
};

int match_prop(std::string_view word) {
  for (int p = 0; p < kPropCount; ++p) {
    if (word.size() != kPropNames[p].size()) continue;
    bool eq = true;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (lower(word[i]) != kPropNames[p][i]) {
        eq = false;
        break;
      }
    }
    if (eq) return p;
  }
  return -1;
}

// Parses `name : value` pairs inside [begin, end). Marks recognized tokens
// consumed and stores first-seen values into `rule`.
void parse_property_body(LenientScanner& sc, std::size_t begin, std::size_t end, RawRule& rule) {
  const std::string_view text = sc.text();
  std::size_t i = begin;
  while (i < end) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t word_begin = i;
    while (i < end && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '-' ||
                       text[i] == '_')) {
      ++i;
    }
    const std::string_view word = text.substr(word_begin, i - word_begin);
    std::size_t j = i;
    while (j < end &&
           (text[j] == ' ' || text[j] == '\t' || text[j] == '"' || text[j] == '\'')) {
      ++j;
    }
    const bool has_colon = j < end && (text[j] == ':' || text[j] == '=');
    if (!has_colon) continue;  // stray word, stays unconsumed
    ++j;
    const int prop = match_prop(word);
    NumberToken tok = sc.number_at(j);
    if (prop < 0) {
      // Unknown property: consume "name: value" (or just "name:") and note it.
      sc.mark(word_begin, tok.ok ? tok.end : j);
      if (tok.ok) {
        rule.repairs.push_back({"", std::string(word), "ignored extra property"});
        i = tok.end;
      } else {
        // Non-numeric value, consume up to the next separator.
        std::size_t k = j;
        while (k < end && text[k] != ';' && text[k] != ',' && text[k] != '\n' && text[k] != '}') {
          ++k;
        }
        sc.mark(word_begin, k);
        rule.repairs.push_back({"", std::string(word), "ignored extra property"});
        i = k;
      }
      continue;
    }
    if (!tok.ok) {
      ++i;
      continue;
    }
    sc.mark(word_begin, tok.end);
    // Consume one trailing separator so canonical "; " leaves no residue.
    std::size_t after = tok.end;
    if (after < end && (text[after] == ';' || text[after] == ',')) sc.mark(after, after + 1);
    if (rule.props[prop].has_value()) {
      rule.repairs.push_back({"", std::string(kPropNames[prop]), "ignored duplicate property"});
    } else {
      rule.props[prop] = tok;
    }
    i = tok.end;
  }
}

bool matches_ci(std::string_view text, std::size_t pos, std::string_view needle) {
  if (pos + needle.size() > text.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (lower(text[pos + i]) != needle[i]) return false;
  }
  return true;
}

std::vector<RawRule> scan_selector_rules(LenientScanner& sc) {
  const std::string_view text = sc.text();
  std::vector<RawRule> rules;
  constexpr std::string_view kAnchor = "component_";
  std::size_t pos = 0;
  while (pos + kAnchor.size() <= text.size()) {
    if (!matches_ci(text, pos, kAnchor)) {
      ++pos;
      continue;
    }
    std::size_t sel_begin = pos;
    if (pos > 0 && (text[pos - 1] == '.' || text[pos - 1] == '#')) {
      sel_begin = pos - 1;
    }
    std::size_t i = pos + kAnchor.size();
    long long number = 0;
    int digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (digits < 7) number = number * 10 + (text[i] - '0');
      ++digits;
      ++i;
    }
    if (digits == 0) {
      pos = i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_ws(text[j])) ++j;
    if (j >= text.size() || text[j] != '{') {
      pos = i;
      continue;
    }
    std::size_t body_begin = j + 1;
    std::size_t body_end = text.find('}', body_begin);
    bool unterminated = false;
    if (body_end == std::string_view::npos) {
      body_end = text.size();
      unterminated = true;
    }

    RawRule rule;
    rule.css_rule = true;
    rule.number = static_cast<int>(number);
    const std::string_view selector_text = text.substr(sel_begin, i - sel_begin);
    const std::string canonical_selector = ".component_" + std::to_string(number);
    if (selector_text != canonical_selector) {
      rule.repairs.push_back(
          {"", "", "normalized selector '" + std::string(selector_text) + "'"});
    }
    if (unterminated) {
      rule.repairs.push_back({"", "", "closed unterminated rule"});
    }
    if (digits > 7) rule.number = -1;  // absurd selector number, rejected during assignment
    sc.mark(sel_begin, body_begin);
    parse_property_body(sc, body_begin, body_end, rule);
    sc.mark(body_end, std::min(body_end + 1, text.size()));
    rules.push_back(std::move(rule));
    pos = body_end < text.size() ? body_end + 1 : text.size();
  }
  return rules;
}

std::optional<NumberToken> json_number(const nlohmann::json& v) {
  NumberToken tok;
  if (v.is_number_integer()) {
    tok.ok = true;
    tok.value = std::clamp<double>(static_cast<double>(v.get<std::int64_t>()), -1.0e9, 1.0e9);
    return tok;
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) return std::nullopt;
    tok.ok = true;
    tok.value = std::clamp(d, -1.0e9, 1.0e9);
    tok.is_float = d != std::floor(d);
    return tok;
  }
  if (v.is_string()) {
    // Accept "10" or "10px".
    const std::string s = v.get<std::string>();
    std::size_t idx = 0;
    while (idx < s.size() && (s[idx] == ' ' || s[idx] == '\t')) ++idx;
    bool neg = false;
    if (idx < s.size() && (s[idx] == '-' || s[idx] == '+')) neg = s[idx++] == '-';
    double value = 0.0;
    int digits = 0;
    while (idx < s.size() && std::isdigit(static_cast<unsigned char>(s[idx])) && digits < 12) {
      value = value * 10.0 + (s[idx] - '0');
      ++digits;
      ++idx;
    }
    if (digits == 0) return std::nullopt;
    if (idx < s.size() && s[idx] == '.') {
      ++idx;
      double scale = 0.1;
      while (idx < s.size() && std::isdigit(static_cast<unsigned char>(s[idx]))) {
        value += (s[idx] - '0') * scale;
        scale *= 0.1;
        ++idx;
        tok.is_float = true;
      }
    }
    tok.ok = true;
    tok.value = neg ? -value : value;
    return tok;
  }
  return std::nullopt;
}

int bracket_depth_limit_exceeded(std::string_view s, int limit) {
  int depth = 0;
  for (char c : s) {
    if (c == '[' || c == '{') {
      if (++depth > limit) return true;
    } else if (c == ']' || c == '}') {
      if (depth > 0) --depth;
    }
  }
  return false;
}

std::vector<RawRule> scan_json_rules(LenientScanner& sc) {
  const std::string_view text = sc.text();
  std::vector<RawRule> rules;
  const std::size_t lb = text.find('[');
  const std::size_t rb = text.rfind(']');
  if (lb == std::string_view::npos || rb == std::string_view::npos || rb <= lb) return rules;
  const std::string_view candidate = text.substr(lb, rb - lb + 1);
  if (bracket_depth_limit_exceeded(candidate, 64)) return rules;
  const nlohmann::json parsed = nlohmann::json::parse(candidate, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_array()) return rules;

  for (const auto& item : parsed) {
    if (!item.is_object()) continue;
    RawRule rule;
    bool any = false;
    for (const auto& [key, value] : item.items()) {
      const int prop = match_prop(key);
      if (prop < 0) continue;
      if (auto tok = json_number(value); tok && !rule.props[prop].has_value()) {
        rule.props[prop] = *tok;
        any = true;
      }
    }
    if (!any) continue;
    rule.repairs.push_back({"", "", "parsed JSON alternate syntax"});
    rules.push_back(std::move(rule));
  }
  if (!rules.empty()) sc.mark(lb, rb + 1);
  return rules;
}

std::vector<RawRule> scan_bare_clusters(LenientScanner& sc) {
  const std::string_view text = sc.text();
  struct Pair {
    int prop;
    NumberToken tok;
    std::size_t name_begin;
    std::size_t end;
  };
  std::vector<Pair> pairs;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_')) {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      continue;
    }
    std::size_t word_begin = i;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    const int prop = match_prop(text.substr(word_begin, i - word_begin));
    if (prop < 0) continue;
    std::size_t j = i;
    while (j < text.size() &&
           (text[j] == ' ' || text[j] == '\t' || text[j] == '"' || text[j] == '\'')) {
      ++j;
    }
    if (j >= text.size() || (text[j] != ':' && text[j] != '=')) continue;
    const NumberToken tok = sc.number_at(j + 1);
    if (!tok.ok) continue;
    // Quoted property names ("left": 1) also land here via the word scan.
    pairs.push_back({prop, tok, word_begin, tok.end});
    i = tok.end;
  }

  std::vector<RawRule> rules;
  RawRule current;
  bool current_any = false;
  int current_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> current_spans;
  auto flush = [&]() {
    if (current_count >= 2) {
      current.repairs.push_back({"", "", "recovered properties from prose"});
      for (auto [b, e] : current_spans) sc.mark(b, e);
      rules.push_back(std::move(current));
    }
    current = RawRule{};
    current_any = false;
    current_count = 0;
    current_spans.clear();
  };
  for (const Pair& pair : pairs) {
    if (current.props[pair.prop].has_value()) flush();
    current.props[pair.prop] = pair.tok;
    current_spans.push_back({pair.name_begin, pair.end});
    current_any = true;
    ++current_count;
  }
  if (current_any) flush();
  return rules;
}

}  // namespace

LenientResult parse_lenient(std::string_view text, int n_components, const Canvas& canvas,
                            const LenientOptions& options) {
  if (n_components < 1) throw ValidationError("parse_lenient requires n_components >= 1");

  LenientResult result;
  ParseDiagnostics& diag = result.diagnostics;
  LenientScanner scanner(text, diag);

  std::vector<RawRule> rules = scan_selector_rules(scanner);
  if (rules.empty()) rules = scan_json_rules(scanner);
  if (rules.empty()) rules = scan_bare_clusters(scanner);
  for (std::size_t i = 0; i < rules.size(); ++i) rules[i].order = static_cast<int>(i);

  if (rules.empty() && !options.allow_fallback) {
    throw UnrecoverableParse("no layout rules extractable from model output");
  }

  // Zero-based selector outputs are a common model failure; shift them.
  {
    bool all_numbered = !rules.empty();
    int min_num = std::numeric_limits<int>::max();
    int max_num = std::numeric_limits<int>::min();
    std::set<int> seen;
    bool dup = false;
    for (const RawRule& r : rules) {
      if (!r.number) {
        all_numbered = false;
        break;
      }
      min_num = std::min(min_num, *r.number);
      max_num = std::max(max_num, *r.number);
      if (!seen.insert(*r.number).second) dup = true;
    }
    if (all_numbered && !dup && min_num == 0 && max_num <= n_components - 1) {
      for (RawRule& r : rules) r.number = *r.number + 1;
      diag.repaired.push_back({"", "", "shifted 0-based selectors to 1-based"});
    }
  }

  // Assign rules to component slots: explicit selector numbers first, then
  // unnumbered rules fill the remaining slots in appearance order.
  std::vector<const RawRule*> slot(static_cast<std::size_t>(n_components), nullptr);
  for (const RawRule& r : rules) {
    if (!r.number) continue;
    const int k = *r.number;
    const std::string sel = "component_" + std::to_string(k);
    if (k < 1 || k > n_components) {
      diag.repaired.push_back({sel, "", "selector out of range, ignored"});
      continue;
    }
    if (slot[static_cast<std::size_t>(k - 1)] != nullptr) {
      diag.repaired.push_back({sel, "", "duplicate selector, ignored"});
      continue;
    }
    slot[static_cast<std::size_t>(k - 1)] = &r;
  }
  {
    std::size_t next = 0;
    for (const RawRule& r : rules) {
      if (r.number) continue;
      while (next < slot.size() && slot[next] != nullptr) ++next;
      if (next >= slot.size()) {
        diag.repaired.push_back({"", "", "extra rule ignored, all components assigned"});
        continue;
      }
      slot[next++] = &r;
    }
  }

  // Build placements. Layers are resolved afterwards.
  struct Pending {
    Placement p;
    std::optional<int> layer;
    int appearance = 0;  // rule order; fallbacks sort after parsed rules
    bool fallback = false;
  };
  std::vector<Pending> pending(static_cast<std::size_t>(n_components));
  for (int k = 0; k < n_components; ++k) {
    const std::string sel = "component_" + std::to_string(k + 1);
    Pending& out = pending[static_cast<std::size_t>(k)];
    const RawRule* rule = slot[static_cast<std::size_t>(k)];
    if (rule == nullptr) {
      out.p = Placement{0, 0, canvas.width, canvas.height, k};
      out.layer = std::nullopt;
      out.fallback = true;
      out.appearance = static_cast<int>(rules.size()) + k;
      diag.repaired.push_back({sel, "", "missing rule, full-canvas fallback"});
      continue;
    }
    out.appearance = rule->order;
    for (const RepairRecord& r : rule->repairs) {
      diag.repaired.push_back({sel, r.property, r.action});
    }
    const int defaults[4] = {0, 0, canvas.width, canvas.height};
    int values[4];
    for (int prop = 0; prop < 4; ++prop) {
      const auto& tok = rule->props[prop];
      if (!tok.has_value()) {
        values[prop] = defaults[prop];
        diag.repaired.push_back({sel, std::string(kPropNames[prop]),
                                 "missing, defaulted to " + std::to_string(defaults[prop])});
        continue;
      }
      values[prop] = round_half_away(tok->value);
      if (tok->is_float) {
        diag.repaired.push_back({sel, std::string(kPropNames[prop]),
                                 "rounded " + format_number(tok->value, true) + " to " +
                                     std::to_string(values[prop])});
      }
      if (tok->out_of_range) {
        diag.repaired.push_back({sel, std::string(kPropNames[prop]), "clamped out-of-range value"});
      }
      if (tok->has_other_suffix) {
        diag.repaired.push_back({sel, std::string(kPropNames[prop]), "ignored non-px suffix"});
      } else if (!tok->has_px && rule->css_rule) {
        diag.repaired.push_back({sel, std::string(kPropNames[prop]), "accepted value without px"});
      }
    }
    out.p.left = values[kLeft];
    out.p.top = values[kTop];
    out.p.width = values[kWidth];
    out.p.height = values[kHeight];
    if (out.p.width < 1) {
      diag.repaired.push_back({sel, "width", "bumped to 1"});
      out.p.width = 1;
    }
    if (out.p.height < 1) {
      diag.repaired.push_back({sel, "height", "bumped to 1"});
      out.p.height = 1;
    }
    if (rule->props[kLayer].has_value()) {
      const auto& tok = *rule->props[kLayer];
      int layer = round_half_away(tok.value);
      if (tok.is_float) {
        diag.repaired.push_back({sel, "layer",
                                 "rounded " + format_number(tok.value, true) + " to " +
                                     std::to_string(layer)});
      }
      if (tok.has_px || tok.has_other_suffix) {
        diag.repaired.push_back({sel, "layer", "ignored suffix on layer"});
      }
      if (layer < 0) {
        diag.repaired.push_back({sel, "layer", "negative layer raised to 0"});
        layer = 0;
      }
      out.layer = layer;
    } else {
      out.layer = std::nullopt;
    }
  }

  // Missing layers take the smallest unused values in appearance order.
  {
    std::set<int> used;
    for (const Pending& p : pending) {
      if (p.layer) used.insert(*p.layer);
    }
    std::vector<int> missing;
    for (int k = 0; k < n_components; ++k) {
      if (!pending[static_cast<std::size_t>(k)].layer) missing.push_back(k);
    }
    std::sort(missing.begin(), missing.end(), [&](int a, int b) {
      return pending[static_cast<std::size_t>(a)].appearance <
             pending[static_cast<std::size_t>(b)].appearance;
    });
    int candidate = 0;
    for (int k : missing) {
      while (used.count(candidate) > 0) ++candidate;
      pending[static_cast<std::size_t>(k)].layer = candidate;
      used.insert(candidate);
      if (!pending[static_cast<std::size_t>(k)].fallback) {
        diag.repaired.push_back({"component_" + std::to_string(k + 1), "layer",
                                 "assigned " + std::to_string(candidate) + " by appearance order"});
      }
    }
  }

  // Duplicate layers (possible when the model repeats values): stable
  // re-rank to 0..n-1 by (layer, appearance).
  {
    std::set<int> layers;
    bool dup = false;
    for (const Pending& p : pending) {
      if (!layers.insert(*p.layer).second) dup = true;
    }
    if (dup) {
      std::vector<int> order(static_cast<std::size_t>(n_components));
      for (int k = 0; k < n_components; ++k) order[static_cast<std::size_t>(k)] = k;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Pending& pa = pending[static_cast<std::size_t>(a)];
        const Pending& pb = pending[static_cast<std::size_t>(b)];
        if (*pa.layer != *pb.layer) return *pa.layer < *pb.layer;
        return pa.appearance < pb.appearance;
      });
      for (int rank = 0; rank < n_components; ++rank) {
        Pending& p = pending[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])];
        if (*p.layer != rank) {
          diag.repaired.push_back({"component_" + std::to_string(order[static_cast<std::size_t>(rank)] + 1),
                                   "layer",
                                   "re-ranked " + std::to_string(*p.layer) + " to " +
                                       std::to_string(rank)});
        }
        p.layer = rank;
      }
    }
  }

  // Clamp into the canvas.
  result.placements.reserve(static_cast<std::size_t>(n_components));
  for (int k = 0; k < n_components; ++k) {
    Pending& p = pending[static_cast<std::size_t>(k)];
    p.p.layer = *p.layer;
    const Placement clamped = clamp_to_canvas(p.p, canvas);
    if (!(clamped == p.p)) {
      diag.repaired.push_back(
          {"component_" + std::to_string(k + 1), "", "clamped to canvas"});
    }
    result.placements.push_back(clamped);
  }

  diag.dropped_text = scanner.dropped_count();

  // Ordering or spacing deviations that every rule-level check missed still
  // make the input non-canonical.
  if (diag.repaired.empty() && diag.dropped_text == 0 &&
      text != serialize(result.placements)) {
    diag.repaired.push_back({"", "", "non-canonical formatting"});
  }

  return result;
}

}  // namespace layoutkit::dsl
