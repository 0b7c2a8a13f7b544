#include <doctest.h>

#include "layoutkit/dsl.hpp"
#include "layoutkit/instruct.hpp"

namespace {

using namespace layoutkit;

Template sample_template(int n, bool background = false) {
  Template t;
  t.id = "t42";
  t.canvas = Canvas{120, 90, "Instagram post", std::nullopt};
  if (background) t.canvas.background = "assets/t42_bg.png";
  t.gold.emplace();
  for (int k = 0; k < n; ++k) {
    Component c;
    c.id = "t42_c" + std::to_string(k);
    c.index = k;
    c.image = "assets/t42_c" + std::to_string(k) + ".png";
    c.kind = k == 0 ? ComponentKind::image : ComponentKind::text;
    c.caption = "caption " + std::to_string(k);
    c.natural_width = 40 + k;
    c.natural_height = 30 + k;
    t.components.push_back(c);
    t.gold->push_back(Placement{k * 10, k * 5, 30, 20, n - 1 - k});
  }
  return t;
}

}  // namespace

TEST_CASE("coordinates predicting emits one example per component") {
  const Template t = sample_template(3);
  const auto examples = instruct::build_coordinates_predicting(t, "renders/t42.png");
  REQUIRE(examples.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const instruct::InstructionExample& ex = examples[static_cast<std::size_t>(k)];
    CHECK(ex.task == instruct::TaskKind::coordinates_predicting);
    CHECK(ex.n_components == 3);
    CHECK(ex.component_index == k);
    REQUIRE(ex.images.size() == 2);
    CHECK(ex.images[0] == "renders/t42.png");
    CHECK(ex.images[1] == t.components[static_cast<std::size_t>(k)].image);
    CHECK(instruct::count_image_placeholders(ex.prompt) == 2);
    REQUIRE(ex.target.has_value());
    const std::vector<Placement> parsed = dsl::parse_strict(*ex.target);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == (*t.gold)[static_cast<std::size_t>(k)]);
    CHECK(dsl::serialize(parsed) == *ex.target);  // canonical bytes
  }

  const Template single = sample_template(1);
  const auto one = instruct::build_coordinates_predicting(single, "renders/t42.png");
  REQUIRE(one.size() == 1);
  CHECK(one[0].target->rfind(".component_1 ", 0) == 0);
}

TEST_CASE("layout recovering shows the render plus every component") {
  const Template t = sample_template(4);
  const instruct::InstructionExample ex = instruct::build_layout_recovering(t, "renders/t42.png");
  CHECK(ex.task == instruct::TaskKind::layout_recovering);
  REQUIRE(ex.images.size() == 5);
  CHECK(instruct::count_image_placeholders(ex.prompt) == 5);
  CHECK(ex.target == dsl::serialize(*t.gold));
  CHECK(dsl::parse_strict(*ex.target) == *t.gold);
}

TEST_CASE("layout planning omits the rendered result and tracks the background") {
  const Template blank = sample_template(2);
  const instruct::InstructionExample ex = instruct::build_layout_planning(blank, true);
  CHECK(ex.images.size() == 2);
  CHECK(instruct::count_image_placeholders(ex.prompt) == 2);
  CHECK(ex.prompt.find("blank") != std::string::npos);
  CHECK(ex.prompt.find("background") == std::string::npos);
  CHECK(ex.target == dsl::serialize(*blank.gold));
  // Canonicality: targets survive a strict parse and re-serialize byte-identically.
  CHECK(dsl::serialize(dsl::parse_strict(*ex.target)) == *ex.target);

  const Template poster = sample_template(2, true);
  const instruct::InstructionExample pex = instruct::build_layout_planning(poster, true);
  REQUIRE(pex.images.size() == 3);
  CHECK(pex.images[0] == "assets/t42_bg.png");
  CHECK(instruct::count_image_placeholders(pex.prompt) == 3);
  CHECK(pex.prompt.find("background") != std::string::npos);
}

TEST_CASE("builders require gold where targets are emitted") {
  Template t = sample_template(2);
  t.gold.reset();
  CHECK_THROWS_AS(instruct::build_coordinates_predicting(t, "r.png"), instruct::MissingGold);
  CHECK_THROWS_AS(instruct::build_layout_recovering(t, "r.png"), instruct::MissingGold);
  CHECK_THROWS_AS(instruct::build_layout_planning(t, true), instruct::MissingGold);
  const instruct::InstructionExample inference = instruct::build_layout_planning(t, false);
  CHECK_FALSE(inference.target.has_value());
}

TEST_CASE("builders are deterministic") {
  const Template t = sample_template(3, true);
  const auto a = instruct::build_layout_planning(t, true);
  const auto b = instruct::build_layout_planning(t, true);
  CHECK(a.prompt == b.prompt);
  CHECK(a.images == b.images);
  CHECK(a.target == b.target);
}

TEST_CASE("few-shot payload structure follows the shot count") {
  const Template t = sample_template(2);
  const instruct::InstructionExample query = instruct::build_layout_planning(t, true);
  const Template demo_tpl = sample_template(3);
  const std::vector<instruct::InstructionExample> demos = {
      instruct::build_layout_planning(demo_tpl, true)};

  const instruct::PromptPayload zero = instruct::assemble_fewshot_prompt(query, demos, 0);
  REQUIRE(zero.messages.size() == 2);
  CHECK(zero.messages[0].role == "system");
  CHECK(zero.messages[1].role == "user");
  CHECK(zero.total_images() == 2);

  const instruct::PromptPayload one = instruct::assemble_fewshot_prompt(query, demos, 1);
  REQUIRE(one.messages.size() == 4);
  CHECK(one.messages[1].role == "user");
  CHECK(one.messages[2].role == "assistant");
  CHECK(one.messages[3].role == "user");
  CHECK(one.total_images() == 3 + 2);  // demo images plus query images

  CHECK_THROWS_AS(instruct::assemble_fewshot_prompt(query, demos, 2), ValidationError);
}

TEST_CASE("instruction examples round-trip through JSON") {
  const Template t = sample_template(2, true);
  const instruct::InstructionExample ex = instruct::build_layout_planning(t, true);
  const instruct::InstructionExample back = instruct::example_from_json(
      nlohmann::json::parse(instruct::example_to_json(ex).dump()));
  CHECK(back.task == ex.task);
  CHECK(back.template_id == ex.template_id);
  CHECK(back.prompt == ex.prompt);
  CHECK(back.images == ex.images);
  CHECK(back.target == ex.target);
  CHECK(back.n_components == ex.n_components);
}
