#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutkit/geometry.hpp"

namespace layoutkit::instruct {

class MissingGold : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class TaskKind { coordinates_predicting, layout_recovering, layout_planning };

std::string_view to_string(TaskKind task);
TaskKind task_from_string(std::string_view name);

// Prompt wording is frozen; bump the version when any template text changes.
inline constexpr std::string_view kPromptVersion = "v1";

// Format contract sent as the system turn of every chat payload.
const std::string& system_preamble();

struct InstructionExample {
  TaskKind task = TaskKind::layout_planning;
  std::string template_id;
  std::string prompt;               // contains one <image_K> placeholder per image
  std::vector<std::string> images;  // ordered references, resolved by the caller
  std::optional<std::string> target;  // canonical CSS block
  int n_components = 0;
  std::optional<int> component_index;  // coordinates task only
};

int count_image_placeholders(std::string_view prompt);

// One example per component: rendered template + that component's image.
// The target is the canonical one-rule block (selector .component_1).
std::vector<InstructionExample> build_coordinates_predicting(const Template& t,
                                                             const std::string& render_ref);

// Rendered template + every component image; target is the full block.
InstructionExample build_layout_recovering(const Template& t, const std::string& render_ref);

// No rendered result: scenario, canvas, optional background, components.
// With training=false the target is omitted when gold is absent.
InstructionExample build_layout_planning(const Template& t, bool training = true);

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string text;
  std::vector<std::string> images;
};

struct PromptPayload {
  std::vector<ChatMessage> messages;

  int total_images() const;
};

// System preamble, k demonstration turn pairs, then the query turn.
PromptPayload assemble_fewshot_prompt(const InstructionExample& query,
                                      std::span<const InstructionExample> demos, int k);

nlohmann::json example_to_json(const InstructionExample& example);
InstructionExample example_from_json(const nlohmann::json& j);

nlohmann::json payload_to_json(const PromptPayload& payload);

}  // namespace layoutkit::instruct
