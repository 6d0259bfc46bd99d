#include <doctest.h>

#include "ontolink/agents.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/mock_provider.hpp"
#include "test_support.hpp"

using namespace ontolink;

namespace {

Candidate cand(const std::string& curie, const std::string& label, std::vector<std::string> synonyms = {}) {
  Candidate c;
  c.curie = curie;
  c.label = label;
  c.surface_forms.push_back(label);
  c.surface_forms.insert(c.surface_forms.end(), synonyms.begin(), synonyms.end());
  c.synonyms_shown = std::move(synonyms);
  c.definition_snippet = "Undefined";
  return c;
}

EntityRecord rec(const std::string& curie, const std::string& label, std::vector<std::string> synonyms = {}) {
  EntityRecord r;
  r.curie = curie;
  r.label = label;
  r.synonyms = std::move(synonyms);
  return r;
}

const std::vector<Candidate>& lebanese_candidates() {
  static const std::vector<Candidate> cs{cand("FOODON:03302684", "middle east bread"),
                                         cand("FOODON:03540141", "01410 - pita bread (efsa foodex2)",
                                              {"pita bread", "pita", "Lebanese bread"}),
                                         cand("FOODON:00005570", "lebanon bologna")};
  return cs;
}

}  // namespace

TEST_CASE("parse_agent_json") {
  CHECK(parse_agent_json(R"({"a": 1})").at("a") == 1);
  CHECK(parse_agent_json("Sure!\n```json\n{\"chosen_id\": \"X:1\", \"explanation\": \"b}\"}\n```\nDone.",
                         {"chosen_id", "explanation"})
            .at("explanation") == "b}");
  CHECK(parse_agent_json("{broken {\"ok\": true}").at("ok") == true);
  CHECK_THROWS_AS(parse_agent_json("no json here"), MalformedResponse);
  CHECK_THROWS_AS(parse_agent_json("[1, 2]"), MalformedResponse);
  CHECK_THROWS_AS(parse_agent_json(R"({"chosen_id": "x"})", {"chosen_id", "explanation"}), MissingKey);
  try {
    parse_agent_json("{}", {"score"});
  } catch (const MissingKey& e) {
    CHECK(std::string(e.what()).find("score") != std::string::npos);
  }
}

TEST_CASE("agent roles round trip") {
  for (const auto role : {AgentRole::selector, AgentRole::scorer, AgentRole::synonym_generator, AgentRole::adjudicator}) {
    CHECK(parse_agent_role(to_string(role)) == role);
  }
  CHECK(parse_agent_role("synonyms") == AgentRole::synonym_generator);
  CHECK_FALSE(parse_agent_role("oracle").has_value());
}

TEST_CASE("prompt templates") {
  const auto p = PromptTemplate::parse("version: x/1\n=== system\nS {{a}}\n=== user\nU {{b}}\n");
  CHECK(p.version == "x/1");
  const auto r = render(p, {{"a", "1"}, {"b", "2"}});
  CHECK(r.system.find("S 1") != std::string::npos);
  CHECK(r.user.find("U 2") != std::string::npos);
  CHECK_THROWS_AS(render(p, {{"a", "1"}}), ConfigError);
  CHECK_THROWS_AS(PromptTemplate::parse("no header"), ConfigError);
  CHECK(render_template("{{x}}{{x}}", {{"x", "ab"}}) == "abab");

  const auto& lib = PromptLibrary::builtin();
  CHECK_FALSE(lib.selector.version.empty());
  CHECK_FALSE(lib.adjudicator.version.empty());
  const auto sel = render_selector_prompt({"LEBANESE", std::string("flatbread")}, lebanese_candidates());
  CHECK(sel.user.find("User entity: LEBANESE") != std::string::npos);
  CHECK(sel.user.find("Context: flatbread") != std::string::npos);
  CHECK(sel.user.find("[2] ID: FOODON:03540141") != std::string::npos);
  CHECK(sel.user.find("Synonyms: pita bread; pita; Lebanese bread") != std::string::npos);
  CHECK(sel.system.find("-1") != std::string::npos);
  CHECK_THROWS_AS(render_selector_prompt({"x", std::nullopt}, std::vector<Candidate>{}), EmptyCandidates);

  const RetryFeedback fb{"Poor Match.", {"Lebanese bread"}};
  const auto retry = render_selector_prompt({"LEBANESE", std::nullopt}, lebanese_candidates(), &fb);
  CHECK(retry.user.find("Poor Match.") != std::string::npos);
  CHECK(retry.user.find("Lebanese bread") != std::string::npos);
}

TEST_CASE("selector decisions") {
  MockProvider p;
  const Mention m{"LEBANESE", std::nullopt};
  const auto& cs = lebanese_candidates();

  SUBCASE("fenced answer inside the candidate set") {
    p.script(AgentRole::selector, "lebanese", "```json\n{\"chosen_id\": \"FOODON:03540141\", \"explanation\": \"pita\"}\n```");
    const auto d = select(p, m, cs);
    REQUIRE_FALSE(d.abstained());
    CHECK(*d.chosen_id == "FOODON:03540141");
    CHECK(d.explanation == "pita");
  }
  SUBCASE("explicit abstention") {
    p.script(AgentRole::selector, "LEBANESE", R"({"chosen_id": "-1", "explanation": "ambiguous demonym"})");
    const auto d = select(p, m, cs);
    CHECK(d.abstained());
    CHECK(d.explanation == "ambiguous demonym");
  }
  SUBCASE("answer outside the candidates becomes abstention") {
    p.script(AgentRole::selector, "LEBANESE", R"({"chosen_id": "FOODON:99999999", "explanation": "made up"})");
    const auto d = select(p, m, cs);
    CHECK(d.abstained());
    CHECK(d.explanation.find("FOODON:99999999") != std::string::npos);
  }
  SUBCASE("unparseable answer becomes abstention") {
    p.script(AgentRole::selector, "LEBANESE", "I think it is pita.");
    CHECK(select(p, m, cs).abstained());
  }
  SUBCASE("missing key becomes abstention") {
    p.script(AgentRole::selector, "LEBANESE", R"({"chosen_id": "FOODON:03540141"})");
    CHECK(select(p, m, cs).abstained());
  }
  SUBCASE("provider failure propagates") {
    p.fail(AgentRole::selector, "LEBANESE");
    CHECK_THROWS_AS(select(p, m, cs), ProviderError);
  }
  SUBCASE("mock rule: exact synonym wins, else first candidate") {
    const auto d = select(p, {"pita", std::nullopt}, cs);
    CHECK(*d.chosen_id == "FOODON:03540141");
    CHECK(*select(p, {"flatbread", std::nullopt}, cs).chosen_id == "FOODON:03302684");
    const RetryFeedback fb{"no", {"Lebanon Bologna"}};
    CHECK(*select(p, m, cs, &fb).chosen_id == "FOODON:00005570");
  }
  SUBCASE("empty candidates") {
    CHECK_THROWS_AS(select(p, m, std::vector<Candidate>{}), EmptyCandidates);
  }
}

TEST_CASE("scorer assessments") {
  MockProvider p;
  const Mention m{"LEBANESE", std::nullopt};
  const auto& cs = lebanese_candidates();
  const SelectorDecision d{std::string("FOODON:03540141"), "pita"};
  const auto chosen = rec("FOODON:03540141", "01410 - pita bread (efsa foodex2)", {"pita bread", "pita", "Lebanese bread"});

  SUBCASE("alternatives are capped at three and restricted to candidates") {
    p.script(AgentRole::scorer, "LEBANESE",
             R"({"score": 0.3, "explanation": "Poor Match.", "alternatives": ["FOODON:03302684", "FOODON:00000000",
                 {"curie": "FOODON:00005570", "reason": "homonym"}, "FOODON:03540141", "FOODON:03302684"]})");
    const auto a = score(p, m, d, chosen, cs, 0.6);
    CHECK(a.score == 0.3);
    CHECK(a.explanation == "Poor Match.");
    REQUIRE(a.alternatives.size() == 2);
    CHECK(a.alternatives[0].curie == "FOODON:03302684");
    CHECK(a.alternatives[1] == Alternative{"FOODON:00005570", "homonym"});
  }
  SUBCASE("alternatives dropped when accepted") {
    p.script(AgentRole::scorer, "LEBANESE", R"({"score": 0.9, "explanation": "ok", "alternatives": ["FOODON:03302684"]})");
    CHECK(score(p, m, d, chosen, cs, 0.6).alternatives.empty());
  }
  SUBCASE("clamping and strings") {
    p.script(AgentRole::scorer, "LEBANESE", R"({"score": 1.7, "explanation": "x"})");
    CHECK(score(p, m, d, chosen, cs, 0.6).score == 1.0);
    p.script(AgentRole::scorer, "LEBANESE", R"({"score": -3, "explanation": "x"})");
    CHECK(score(p, m, d, chosen, cs, 0.6).score == 0.0);
    p.script(AgentRole::scorer, "LEBANESE", R"({"score": "0.75", "explanation": "x"})");
    CHECK(score(p, m, d, chosen, cs, 0.6).score == 0.75);
    p.script(AgentRole::scorer, "LEBANESE", R"({"score": "high", "explanation": "x"})");
    CHECK(score(p, m, d, chosen, cs, 0.6).score == 0.0);
    p.script(AgentRole::scorer, "LEBANESE", "garbage");
    CHECK(score(p, m, d, chosen, cs, 0.6).score == 0.0);
  }
  SUBCASE("mock rule") {
    CHECK(score(p, {"Pita", std::nullopt}, d, chosen, cs, 0.6).score == 1.0);
    const auto low = score(p, m, d, chosen, cs, 0.6);
    CHECK(low.score == 0.2);
    CHECK(low.explanation == MockProvider::kLowConfidenceRationale);
    CHECK(low.alternatives.size() == 2);
  }
  SUBCASE("abstentions cannot be scored") {
    CHECK_THROWS_AS(score(p, m, SelectorDecision{}, chosen, cs, 0.6), std::invalid_argument);
  }
  SUBCASE("attempt is passed to the provider") {
    score(p, m, d, chosen, cs, 0.6, 2);
    const auto calls = p.calls();
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].role == AgentRole::scorer);
    CHECK(calls[0].attempt == 2);
  }
}

TEST_CASE("synonym generation") {
  MockProvider p;
  const Mention m{"LEBANESE", std::nullopt};
  p.script(AgentRole::synonym_generator, "LEBANESE",
           R"({"synonyms": ["Lebanese bread", "lebanese BREAD", "LEBANESE", " ", 7, "pita", "a", "b", "c", "d"]})");
  const auto s = generate_synonyms(p, m, "Poor Match.");
  CHECK(s.synonyms == std::vector<std::string>{"Lebanese bread", "pita", "a", "b", "c"});
  CHECK(s.failure_reason == "Poor Match.");
  CHECK_THROWS_AS(generate_synonyms(p, m, "  "), std::invalid_argument);

  MockProvider table;
  table.set_synonyms("sea salt", {"salt", "sea-salt"});
  CHECK(generate_synonyms(table, {"Sea Salt", std::nullopt}, "why").synonyms ==
        std::vector<std::string>{"salt", "sea-salt"});
  CHECK(generate_synonyms(table, {"unknown", std::nullopt}, "why").synonyms.empty());
  table.script(AgentRole::synonym_generator, "x", "nope");
  CHECK(generate_synonyms(table, {"x", std::nullopt}, "why").synonyms.empty());
  CHECK(table.call_count(AgentRole::synonym_generator) == 3);
}

TEST_CASE("mock scripts: attempt matching and latest wins") {
  MockProvider p;
  const Mention m{"x", std::nullopt};
  const std::vector<Candidate> cs{cand("A:1", "one"), cand("A:2", "two")};
  const SelectorDecision d{std::string("A:1"), ""};
  p.script(AgentRole::scorer, "x", R"({"score": 0.1, "explanation": "any"})");
  p.script(AgentRole::scorer, "x", R"({"score": 0.5, "explanation": "second"})", 2);
  CHECK(score(p, m, d, rec("A:1", "one"), cs, 0.6, 1).explanation == "any");
  CHECK(score(p, m, d, rec("A:1", "one"), cs, 0.6, 2).explanation == "second");
  p.script(AgentRole::scorer, "x", R"({"score": 0.9, "explanation": "override"})");
  CHECK(score(p, m, d, rec("A:1", "one"), cs, 0.6, 2).explanation == "override");

  const auto fixture = MockFixture::from_json(nlohmann::json::parse(R"({
    "scripts": [{"role": "synonyms", "mention": "x", "response_json": {"synonyms": ["y"]}},
                {"role": "selector", "mention": "x", "error": "down"}]})"));
  MockProvider q(fixture);
  CHECK(generate_synonyms(q, m, "r").synonyms == std::vector<std::string>{"y"});
  CHECK_THROWS_AS(select(q, m, cs), ProviderError);
  CHECK_THROWS_AS(MockFixture::from_json(nlohmann::json::parse(R"({"scripts": [{"role": "bogus", "mention": "x"}]})")),
                  ConfigError);
}

TEST_CASE("format_number") {
  CHECK(format_number(0.6) == "0.6");
  CHECK(format_number(1.0) == "1");
}
