#include "layoutkit/instruct.hpp"

#include "layoutkit/dsl.hpp"

namespace layoutkit::instruct {

namespace {

using nlohmann::json;

std::string canvas_line(const Template& t) {
  return "Scenario: " + t.canvas.scenario + ". Canvas: " + std::to_string(t.canvas.width) + "x" +
         std::to_string(t.canvas.height) + " pixels.";
}

std::string placeholder(int k) { return "<image_" + std::to_string(k) + ">"; }

std::string placeholder_run(int first, int count) {
  std::string out;
  for (int i = 0; i < count; ++i) {
    if (i > 0) out += ' ';
    out += placeholder(first + i);
  }
  return out;
}

const std::vector<Placement>& require_gold(const Template& t, const char* task) {
  if (!t.gold) {
    throw MissingGold("template " + t.id + ": " + task + " requires a gold layout");
  }
  return *t.gold;
}

}  // namespace

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::coordinates_predicting: return "coordinates_predicting";
    case TaskKind::layout_recovering: return "layout_recovering";
    case TaskKind::layout_planning: return "layout_planning";
  }
  return "layout_planning";
}

TaskKind task_from_string(std::string_view name) {
  if (name == "coordinates_predicting") return TaskKind::coordinates_predicting;
  if (name == "layout_recovering") return TaskKind::layout_recovering;
  if (name == "layout_planning") return TaskKind::layout_planning;
  throw ValidationError("unknown task: " + std::string(name));
}

const std::string& system_preamble() {
  static const std::string preamble =
      "You are a layout planning assistant for visually-rich documents. "
      "Answer with CSS rules only, one rule per line, each in the exact form:\n"
      ".component_K { left: <int>px; top: <int>px; width: <int>px; height: <int>px; "
      "layer: <int>; }\n"
      "Coordinates are integer pixels inside the given canvas. The layer property "
      "controls stacking order; higher layers draw on top. Do not add commentary.";
  return preamble;
}

int count_image_placeholders(std::string_view prompt) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = prompt.find("<image_", pos)) != std::string_view::npos) {
    ++count;
    pos += 7;
  }
  return count;
}

std::vector<InstructionExample> build_coordinates_predicting(const Template& t,
                                                             const std::string& render_ref) {
  const std::vector<Placement>& gold = require_gold(t, "coordinates predicting");
  const int n = static_cast<int>(t.components.size());
  std::vector<InstructionExample> out;
  out.reserve(t.components.size());
  for (int k = 0; k < n; ++k) {
    InstructionExample ex;
    ex.task = TaskKind::coordinates_predicting;
    ex.template_id = t.id;
    ex.n_components = n;
    ex.component_index = k;
    ex.images = {render_ref, t.components[static_cast<std::size_t>(k)].image};
    ex.prompt = canvas_line(t) + "\nThe finished design template is shown in " + placeholder(1) +
                ".\nComponent " + std::to_string(k + 1) + " of " + std::to_string(n) +
                " is shown in " + placeholder(2) +
                ".\nPredict the coordinates of this component within the template. Answer with "
                "exactly one CSS rule, using the selector .component_1.";
    ex.target = dsl::serialize_rule(1, gold[static_cast<std::size_t>(k)]);
    out.push_back(std::move(ex));
  }
  return out;
}

InstructionExample build_layout_recovering(const Template& t, const std::string& render_ref) {
  const std::vector<Placement>& gold = require_gold(t, "layout recovering");
  const int n = static_cast<int>(t.components.size());
  InstructionExample ex;
  ex.task = TaskKind::layout_recovering;
  ex.template_id = t.id;
  ex.n_components = n;
  ex.images.push_back(render_ref);
  for (const Component& c : t.components) ex.images.push_back(c.image);
  ex.prompt = canvas_line(t) + "\nThe finished design template is shown in " + placeholder(1) +
              ".\nThe " + std::to_string(n) + " components are shown in input order: " +
              placeholder_run(2, n) +
              ".\nRecover the coordinates of every component. Answer with one CSS rule per "
              "component, .component_1 through .component_" +
              std::to_string(n) + ", in input order.";
  ex.target = dsl::serialize(gold);
  return ex;
}

InstructionExample build_layout_planning(const Template& t, bool training) {
  const int n = static_cast<int>(t.components.size());
  InstructionExample ex;
  ex.task = TaskKind::layout_planning;
  ex.template_id = t.id;
  ex.n_components = n;

  std::string setting;
  int first_component_image = 1;
  if (t.canvas.background) {
    ex.images.push_back(*t.canvas.background);
    setting = "The canvas background is shown in " + placeholder(1) + ".";
    first_component_image = 2;
  } else {
    setting = "The canvas is blank.";
  }
  for (const Component& c : t.components) ex.images.push_back(c.image);

  ex.prompt = canvas_line(t) + " " + setting + "\nArrange the " + std::to_string(n) +
              " components shown in input order: " + placeholder_run(first_component_image, n) +
              ".\nAnswer with one CSS rule per component, .component_1 through .component_" +
              std::to_string(n) + ", in input order.";

  if (t.gold) {
    ex.target = dsl::serialize(*t.gold);
  } else if (training) {
    throw MissingGold("template " + t.id + ": layout planning training target requires gold");
  }
  return ex;
}

int PromptPayload::total_images() const {
  int total = 0;
  for (const ChatMessage& m : messages) total += static_cast<int>(m.images.size());
  return total;
}

PromptPayload assemble_fewshot_prompt(const InstructionExample& query,
                                      std::span<const InstructionExample> demos, int k) {
  if (k < 0) throw ValidationError("shot count must be >= 0");
  if (static_cast<int>(demos.size()) < k) {
    throw ValidationError("need " + std::to_string(k) + " demonstrations, got " +
                          std::to_string(demos.size()));
  }
  PromptPayload payload;
  payload.messages.push_back({"system", system_preamble(), {}});
  for (int i = 0; i < k; ++i) {
    const InstructionExample& demo = demos[static_cast<std::size_t>(i)];
    if (!demo.target) {
      throw ValidationError("demonstration " + std::to_string(i) + " has no target");
    }
    payload.messages.push_back({"user", demo.prompt, demo.images});
    payload.messages.push_back({"assistant", *demo.target, {}});
  }
  payload.messages.push_back({"user", query.prompt, query.images});
  return payload;
}

json example_to_json(const InstructionExample& example) {
  json meta{{"n_components", example.n_components},
            {"prompt_version", std::string(kPromptVersion)}};
  if (example.component_index) meta["component_index"] = *example.component_index;
  return json{
      {"task", std::string(to_string(example.task))},
      {"template_id", example.template_id},
      {"prompt", example.prompt},
      {"images", example.images},
      {"target", example.target ? json(*example.target) : json(nullptr)},
      {"meta", std::move(meta)},
  };
}

InstructionExample example_from_json(const json& j) {
  InstructionExample ex;
  ex.task = task_from_string(j.at("task").get<std::string>());
  ex.template_id = j.at("template_id").get<std::string>();
  ex.prompt = j.at("prompt").get<std::string>();
  ex.images = j.at("images").get<std::vector<std::string>>();
  if (auto it = j.find("target"); it != j.end() && !it->is_null()) {
    ex.target = it->get<std::string>();
  }
  if (auto it = j.find("meta"); it != j.end()) {
    ex.n_components = it->value("n_components", 0);
    if (auto ci = it->find("component_index"); ci != it->end() && !ci->is_null()) {
      ex.component_index = ci->get<int>();
    }
  }
  return ex;
}

json payload_to_json(const PromptPayload& payload) {
  json messages = json::array();
  for (const ChatMessage& m : payload.messages) {
    messages.push_back({{"role", m.role}, {"text", m.text}, {"images", m.images}});
  }
  return json{{"messages", std::move(messages)}};
}

}  // namespace layoutkit::instruct
