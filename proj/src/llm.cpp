#include "layoutkit/llm.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "layoutkit/dsl.hpp"
#include "layoutkit/image.hpp"
#include "layoutkit/rng.hpp"
#include "layoutkit/sha256.hpp"

namespace layoutkit::llm {

namespace {

using nlohmann::json;

std::string base64_encode(std::span<const std::uint8_t> data) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
    i += 3;
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const std::uint32_t v = data[i] << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rest == 2) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

bool retryable_status(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status < 600);
}

// Splits message text on <image_K> placeholders into alternating text and
// image parts, pairing placeholders with the message's image list in order.
json message_content(const instruct::ChatMessage& message,
                     const std::filesystem::path& image_root) {
  if (message.images.empty()) return json(message.text);

  json parts = json::array();
  std::size_t image_index = 0;
  std::size_t pos = 0;
  const std::string& text = message.text;
  while (pos < text.size()) {
    const std::size_t open = text.find("<image_", pos);
    if (open == std::string::npos) break;
    const std::size_t close = text.find('>', open);
    if (close == std::string::npos) break;
    if (open > pos) {
      parts.push_back({{"type", "text"}, {"text", text.substr(pos, open - pos)}});
    }
    if (image_index < message.images.size()) {
      const std::filesystem::path asset = image_root / message.images[image_index];
      const std::vector<std::uint8_t> bytes = img::read_file(asset);
      parts.push_back(
          {{"type", "image_url"},
           {"image_url", {{"url", "data:image/png;base64," + base64_encode(bytes)}}}});
      ++image_index;
    }
    pos = close + 1;
  }
  if (pos < text.size()) {
    parts.push_back({{"type", "text"}, {"text", text.substr(pos)}});
  }
  return parts;
}

std::string extract_completion_text(const std::string& body) {
  const json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw NetworkError("endpoint returned a non-JSON completion body");
  }
  const auto choices = parsed.find("choices");
  if (choices == parsed.end() || !choices->is_array() || choices->empty()) {
    throw NetworkError("completion body has no choices");
  }
  const json& message = choices->front().value("message", json::object());
  const auto content = message.find("content");
  if (content == message.end()) {
    throw NetworkError("completion message has no content");
  }
  if (content->is_string()) return content->get<std::string>();
  if (content->is_array()) {
    std::string out;
    for (const json& part : *content) {
      if (part.is_object() && part.value("type", "") == "text") {
        out += part.value("text", "");
      }
    }
    return out;
  }
  throw NetworkError("completion content has an unsupported shape");
}

}  // namespace

void require_valid(const EndpointConfig& config) {
  if (config.max_images < 0) throw ValidationError("max_images must be >= 0");
  if (config.timeout_seconds <= 0.0) throw ValidationError("timeout must be > 0");
  if (config.max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
  if (config.backoff_base_seconds < 0.0) throw ValidationError("backoff base must be >= 0");
  if (config.requests_per_minute < 1) throw ValidationError("rate limit must be >= 1/min");
}

std::int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

TranscriptLog::TranscriptLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void TranscriptLog::append(const TranscriptRecord& record) {
  json j{
      {"payload_hash", record.payload_hash},
      {"prompt", record.prompt_json},
      {"response", record.response_text},
      {"http_status", record.http_status},
      {"attempt", record.attempt},
      {"latency_ms", record.latency_ms},
      {"timestamp_ms", record.timestamp_ms},
      {"usage", record.usage.is_null() ? json(nullptr) : record.usage},
  };
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append transcript: " + path_.string());
  out << j.dump() << '\n';
  ++appended_;
}

std::string payload_cache_key(const instruct::PromptPayload& payload, const std::string& model) {
  return sha256_hex(instruct::payload_to_json(payload).dump() + "\n" + model);
}

json payload_to_wire(const instruct::PromptPayload& payload, const EndpointConfig& config,
                     const std::filesystem::path& image_root) {
  json messages = json::array();
  for (const instruct::ChatMessage& m : payload.messages) {
    messages.push_back({{"role", m.role}, {"content", message_content(m, image_root)}});
  }
  return json{
      {"model", config.model},
      {"temperature", config.temperature},
      {"messages", std::move(messages)},
  };
}

ChatClient::ChatClient(EndpointConfig config, Clock* clock, TranscriptLog* transcript)
    : config_(std::move(config)), clock_(clock ? clock : &system_clock_), transcript_(transcript) {
  require_valid(config_);
}

void ChatClient::rate_limit_wait() {
  constexpr std::int64_t kWindowMs = 60'000;
  for (;;) {
    const std::int64_t now = clock_->now_ms();
    while (!window_.empty() && window_.front() + kWindowMs <= now) window_.pop_front();
    if (static_cast<int>(window_.size()) < config_.requests_per_minute) {
      window_.push_back(now);
      return;
    }
    clock_->sleep_ms(window_.front() + kWindowMs - now);
  }
}

std::string ChatClient::complete(const instruct::PromptPayload& payload,
                                 const std::filesystem::path& image_root) {
  const int images = payload.total_images();
  if (config_.supports_images) {
    if (images > config_.max_images) {
      throw TooManyImages("payload carries " + std::to_string(images) +
                          " images but the endpoint accepts at most " +
                          std::to_string(config_.max_images));
    }
  } else if (images > 0) {
    throw TooManyImages("endpoint is text-only but the payload carries " +
                        std::to_string(images) + " images");
  }

  std::string auth_token;
  if (!config_.auth_env.empty()) {
    const char* token = std::getenv(config_.auth_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw AuthMissing("environment variable " + config_.auth_env + " is not set");
    }
    auth_token = token;
  }

  const json wire = payload_to_wire(payload, config_, image_root);
  const std::string body = wire.dump();
  const std::string hash = payload_cache_key(payload, config_.model);

  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    rate_limit_wait();

    httplib::Client http(config_.base_url);
    http.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(config_.timeout_seconds * 1000)));
    http.set_read_timeout(
        std::chrono::milliseconds(static_cast<int>(config_.timeout_seconds * 1000)));
    httplib::Headers headers;
    if (!auth_token.empty()) headers.emplace("Authorization", "Bearer " + auth_token);

    const std::int64_t t0 = clock_->now_ms();
    ++network_calls_;
    httplib::Result res = http.Post(config_.path, headers, body, "application/json");
    const std::int64_t t1 = clock_->now_ms();

    TranscriptRecord record;
    record.payload_hash = hash;
    record.prompt_json = body;
    record.attempt = attempt;
    record.latency_ms = static_cast<double>(t1 - t0);
    record.timestamp_ms = t1;
    if (res) {
      record.http_status = res->status;
      record.response_text = res->body;
      const json parsed = json::parse(res->body, nullptr, false);
      if (!parsed.is_discarded() && parsed.contains("usage")) record.usage = parsed["usage"];
    } else {
      record.http_status = 0;
      record.response_text = "connection error: " + httplib::to_string(res.error());
    }
    if (transcript_ != nullptr) transcript_->append(record);

    if (res && res->status == 200) {
      return extract_completion_text(res->body);
    }
    last_status = record.http_status;
    last_error = res ? ("HTTP " + std::to_string(res->status)) : record.response_text;
    if (!retryable_status(last_status)) break;
    if (attempt < config_.max_attempts) {
      const double backoff = config_.backoff_base_seconds * std::pow(2.0, attempt - 1);
      clock_->sleep_ms(static_cast<std::int64_t>(backoff * 1000.0));
    }
  }
  throw ExhaustedRetries("completion failed after retries: " + last_error, last_status);
}

instruct::InstructionExample to_text_only(const instruct::InstructionExample& example,
                                          const Template& tpl) {
  instruct::InstructionExample out = example;

  // Captions in image order: background or rendering first when present,
  // then components.
  std::vector<std::string> captions;
  if (example.task == instruct::TaskKind::layout_planning && tpl.canvas.background) {
    captions.push_back("the " + tpl.canvas.scenario + " background");
  } else if (example.task != instruct::TaskKind::layout_planning) {
    captions.push_back("the finished template rendering");
  }
  if (example.task == instruct::TaskKind::coordinates_predicting && example.component_index) {
    const Component& c = tpl.components[static_cast<std::size_t>(*example.component_index)];
    captions.push_back(c.caption.value_or(std::string(to_string(c.kind)) + " component"));
  } else {
    for (const Component& c : tpl.components) {
      captions.push_back(c.caption.value_or(std::string(to_string(c.kind)) + " component"));
    }
  }

  std::string text = out.prompt;
  for (std::size_t i = 0; i < out.images.size(); ++i) {
    const std::string placeholder = "<image_" + std::to_string(i + 1) + ">";
    const std::string replacement =
        i < captions.size() ? "[" + captions[i] + "]" : "[component image]";
    const std::size_t pos = text.find(placeholder);
    if (pos != std::string::npos) {
      text.replace(pos, placeholder.size(), replacement);
    }
  }
  out.prompt = std::move(text);
  out.images.clear();
  return out;
}

BaselineStats run_baseline(const corpus::Corpus& corpus, ChatClient& client,
                           const BaselineOptions& options) {
  if (options.task != instruct::TaskKind::layout_planning) {
    throw ValidationError("run_baseline evaluates the layout planning task only");
  }
  if (options.shots < 0) throw ValidationError("shots must be >= 0");
  if (options.out_file.empty()) throw ValidationError("baseline output file is required");

  const std::vector<const Template*> val = corpus.split("val");
  if (val.empty()) throw ValidationError("corpus has no validation split");
  const bool text_only = !client.config().supports_images;

  // Fixed seeded demonstrations from the train split; small templates keep
  // the request inside the image budget.
  std::vector<const Template*> train = corpus.split("train");
  std::vector<const Template*> demo_tpls;
  if (options.shots > 0) {
    if (train.empty()) throw ValidationError("few-shot baseline needs a train split");
    std::vector<const Template*> candidates;
    for (const Template* t : train) {
      if (t->gold && t->components.size() <= 2) candidates.push_back(t);
    }
    if (static_cast<int>(candidates.size()) < options.shots) candidates = train;
    if (static_cast<int>(candidates.size()) < options.shots) {
      throw ValidationError("need " + std::to_string(options.shots) +
                            " demonstration templates but the train split has " +
                            std::to_string(candidates.size()));
    }
    Rng rng(options.seed ^ 0x5851F42D4C957F2Dull);
    for (int s = 0; s < options.shots; ++s) {
      const int j = s + rng.below(static_cast<int>(candidates.size()) - s);
      std::swap(candidates[static_cast<std::size_t>(s)], candidates[static_cast<std::size_t>(j)]);
      demo_tpls.push_back(candidates[static_cast<std::size_t>(s)]);
    }
  }

  if (!options.cache_dir.empty()) std::filesystem::create_directories(options.cache_dir);
  if (options.out_file.has_parent_path()) {
    std::filesystem::create_directories(options.out_file.parent_path());
  }
  std::ofstream out(options.out_file, std::ios::trunc);
  if (!out) throw Error("cannot write predictions: " + options.out_file.string());

  BaselineStats stats;
  for (const Template* d : demo_tpls) {
    if (!stats.demo_template_id.empty()) stats.demo_template_id += ",";
    stats.demo_template_id += d->id;
  }

  for (const Template* tpl : val) {
    if (options.max_components > 0 &&
        static_cast<int>(tpl->components.size()) > options.max_components) {
      continue;
    }
    ++stats.templates;
    const int n = static_cast<int>(tpl->components.size());

    instruct::InstructionExample query = instruct::build_layout_planning(*tpl, false);
    std::vector<instruct::InstructionExample> demos;
    for (const Template* d : demo_tpls) {
      instruct::InstructionExample demo = instruct::build_layout_planning(*d, true);
      if (text_only) demo = to_text_only(demo, *d);
      demos.push_back(std::move(demo));
    }
    if (text_only) query = to_text_only(query, *tpl);
    const instruct::PromptPayload payload =
        instruct::assemble_fewshot_prompt(query, demos, options.shots);
    const std::string key = payload_cache_key(payload, client.config().model);
    const std::filesystem::path cache_file =
        options.cache_dir.empty() ? std::filesystem::path()
                                  : options.cache_dir / (key + ".json");

    std::string response;
    bool have_response = false;
    bool from_cache = false;
    std::string error_message;
    if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
      std::ifstream in(cache_file);
      json cached = json::parse(in, nullptr, false);
      if (!cached.is_discarded() && cached.contains("response")) {
        response = cached["response"].get<std::string>();
        have_response = true;
        from_cache = true;
        ++stats.cached;
      }
    }
    if (!have_response) {
      try {
        response = client.complete(payload, corpus.root);
        have_response = true;
        ++stats.network;
        if (!cache_file.empty()) {
          json cached{{"key", key},
                      {"model", client.config().model},
                      {"template_id", tpl->id},
                      {"response", response}};
          std::ofstream cache_out(cache_file, std::ios::trunc);
          cache_out << cached.dump(2) << '\n';
        }
      } catch (const Error& e) {
        error_message = e.what();
        ++stats.failed;
      }
    }

    const dsl::LenientResult parsed =
        dsl::parse_lenient(have_response ? response : "", n, tpl->canvas);
    json diag_repairs = json::array();
    for (const dsl::RepairRecord& r : parsed.diagnostics.repaired) {
      diag_repairs.push_back({{"selector", r.selector}, {"property", r.property},
                              {"action", r.action}});
    }
    json placements = json::array();
    for (const Placement& p : parsed.placements) {
      placements.push_back({{"left", p.left},
                            {"top", p.top},
                            {"width", p.width},
                            {"height", p.height},
                            {"layer", p.layer}});
    }
    json line{
        {"template_id", tpl->id},
        {"css_text", dsl::serialize(parsed.placements)},
        {"placements", std::move(placements)},
        {"diagnostics",
         {{"repaired", std::move(diag_repairs)},
          {"dropped_text", parsed.diagnostics.dropped_text}}},
        {"fallback", !have_response},
        {"cached", from_cache},
    };
    if (!error_message.empty()) line["error"] = error_message;
    out << line.dump() << '\n';
  }
  return stats;
}

}  // namespace layoutkit::llm
