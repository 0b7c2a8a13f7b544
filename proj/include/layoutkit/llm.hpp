#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutkit/corpus.hpp"
#include "layoutkit/instruct.hpp"

namespace layoutkit::llm {

class TooManyImages : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AuthMissing : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ExhaustedRetries : public NetworkError {
 public:
  ExhaustedRetries(const std::string& message, int last_status)
      : NetworkError(message), last_status_(last_status) {}
  int last_status() const { return last_status_; }

 private:
  int last_status_;
};

struct EndpointConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string auth_env = "OPENAI_API_KEY";  // empty disables the auth header
  bool supports_images = true;
  int max_images = 4;
  double timeout_seconds = 60.0;
  int max_attempts = 3;
  double backoff_base_seconds = 0.5;
  int requests_per_minute = 60;
  double temperature = 0.0;
};

void require_valid(const EndpointConfig& config);

// Injectable time source so retry/backoff and rate limiting are testable
// with a virtual clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_ms(std::int64_t ms) override;
};

class VirtualClock : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() override { return now_; }
  void sleep_ms(std::int64_t ms) override {
    now_ += ms;
    sleeps.push_back(ms);
  }
  void advance(std::int64_t ms) { now_ += ms; }

  std::vector<std::int64_t> sleeps;

 private:
  std::int64_t now_;
};

struct TranscriptRecord {
  std::string payload_hash;
  std::string prompt_json;    // full wire payload
  std::string response_text;  // verbatim body, stored before any repair
  int http_status = 0;        // 0 on connection failure
  int attempt = 0;
  double latency_ms = 0.0;
  std::int64_t timestamp_ms = 0;
  nlohmann::json usage;  // token usage when the endpoint reports it
};

// Append-only JSONL log of every network attempt.
class TranscriptLog {
 public:
  explicit TranscriptLog(std::filesystem::path path);
  void append(const TranscriptRecord& record);
  int appended() const { return appended_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int appended_ = 0;
};

// Pure function of (payload, model name); the cache key.
std::string payload_cache_key(const instruct::PromptPayload& payload, const std::string& model);

// Chat-completions wire shape; image parts become base64 data URIs resolved
// against image_root.
nlohmann::json payload_to_wire(const instruct::PromptPayload& payload,
                               const EndpointConfig& config,
                               const std::filesystem::path& image_root);

class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config, Clock* clock = nullptr,
                      TranscriptLog* transcript = nullptr);

  // Sends the payload, retrying transient failures per the retry policy.
  // Throws TooManyImages / AuthMissing before any network traffic and
  // ExhaustedRetries after the attempt budget is spent.
  std::string complete(const instruct::PromptPayload& payload,
                       const std::filesystem::path& image_root = ".");

  int network_calls() const { return network_calls_; }
  const EndpointConfig& config() const { return config_; }

 private:
  void rate_limit_wait();

  EndpointConfig config_;
  SystemClock system_clock_;
  Clock* clock_;
  TranscriptLog* transcript_;
  std::deque<std::int64_t> window_;  // timestamps of recent requests
  int network_calls_ = 0;
};

// Swaps every image for its caption: placeholders in the prompt text are
// replaced inline and the image list is cleared.
instruct::InstructionExample to_text_only(const instruct::InstructionExample& example,
                                          const Template& tpl);

struct BaselineOptions {
  instruct::TaskKind task = instruct::TaskKind::layout_planning;
  int shots = 0;  // 0 or 1 in the reference protocol, larger values allowed
  std::uint64_t seed = 0;
  std::filesystem::path cache_dir;
  std::filesystem::path out_file;
  int max_components = 0;  // 0 = no cap; 4 mirrors the reference protocol
};

struct BaselineStats {
  int templates = 0;
  int cached = 0;
  int network = 0;
  int failed = 0;
  std::string demo_template_id;  // demonstration provenance, comma-joined for k > 1
};

// Runs the external-model baseline over the corpus validation split and
// writes one predictions line per template; failures fall back to
// full-canvas layouts and are flagged rather than aborting the run.
BaselineStats run_baseline(const corpus::Corpus& corpus, ChatClient& client,
                           const BaselineOptions& options);

}  // namespace layoutkit::llm
