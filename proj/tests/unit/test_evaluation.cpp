#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "ontolink/errors.hpp"
#include "ontolink/evaluation.hpp"
#include "ontolink/mock_provider.hpp"
#include "test_support.hpp"

using namespace ontolink;
namespace t = ontolink::testing;

namespace {

RunRecord rr(const std::string& m, std::optional<std::string> first, std::optional<std::string> final_id, int hops,
             bool syn) {
  return {m, std::move(first), std::move(final_id), hops, syn};
}

// Naive recount straight from the indicator definitions.
struct Recount {
  double overall, first, final_, retry, synonym;
};

Recount recount(const std::vector<RunRecord>& rs, const std::vector<GoldAnnotation>& gold) {
  double o = 0, f = 0, l = 0, r = 0, s = 0;
  for (const auto& rec : rs) {
    const GoldAnnotation* g = nullptr;
    for (const auto& x : gold) {
      if (x.mention == rec.mention) g = &x;
    }
    REQUIRE(g != nullptr);
    const auto in = [&](const std::optional<std::string>& y) {
      if (!y) return false;
      for (const auto& tgt : g->targets) {
        if (tgt == *y) return true;
      }
      return false;
    };
    const bool a = in(rec.y_first), b = in(rec.y_final);
    o += (a || b) ? 1 : 0;
    f += a ? 1 : 0;
    l += b ? 1 : 0;
    r += rec.hops > 1 ? 1 : 0;
    s += rec.used_synonyms ? 1 : 0;
  }
  const double m = static_cast<double>(rs.size());
  return {o / m, f / m, l / m, r / m, s / m};
}

EntityRecord rec(const std::string& curie, const std::string& label) {
  EntityRecord r;
  r.curie = curie;
  r.label = label;
  return r;
}

std::vector<DriftLabel> repeat(std::initializer_list<std::pair<DriftLabel, int>> counts) {
  std::vector<DriftLabel> out;
  for (const auto& [label, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), label);
  return out;
}

}  // namespace

TEST_CASE("four-record metrics fixture") {
  const std::vector<GoldAnnotation> gold{{"r1", {"A:1"}}, {"r2", {"A:2"}}, {"r3", {"A:3"}}, {"r4", {"A:4"}}};
  const std::vector<RunRecord> rs{rr("r1", "A:1", "A:1", 1, false), rr("r2", "X:1", "A:2", 2, true),
                                  rr("r3", "A:3", "X:2", 2, true), rr("r4", "X:3", "X:3", 1, false)};
  const auto rep = compute_metrics(rs, gold);
  CHECK(rep.m == 4);
  CHECK(rep.acc1_overall == 0.75);
  CHECK(rep.acc1_first == 0.5);
  CHECK(rep.acc1_final == 0.5);
  CHECK(rep.retry_rate == 0.5);
  CHECK(rep.synonym_rate == 0.5);
  const auto j = report_to_json(rep, 0.6);
  CHECK(j.dump() ==
        R"({"M":4,"tau":0.6,"acc1_overall":0.75,"acc1_first":0.5,"acc1_final":0.5,"retry_rate":0.5,"synonym_rate":0.5})");
  CHECK_FALSE(report_to_json(rep).contains("tau"));
}

TEST_CASE("metric edge cases") {
  const std::vector<GoldAnnotation> gold{{"a", {"A:1"}}, {"b", {"A:2", "A:3"}}};
  const std::vector<RunRecord> abstain{rr("a", std::nullopt, std::nullopt, 2, false),
                                       rr("b", std::nullopt, std::nullopt, 1, false)};
  const auto zero = compute_metrics(abstain, gold);
  CHECK(zero.acc1_overall == 0.0);
  CHECK(zero.acc1_first == 0.0);
  CHECK(zero.acc1_final == 0.0);

  const std::vector<RunRecord> one{rr("b", "A:3", "A:3", 1, false)};
  const auto full = compute_metrics(one, gold);
  CHECK(full.acc1_overall == 1.0);
  CHECK(full.acc1_first == 1.0);
  CHECK(full.acc1_final == 1.0);

  const std::vector<RunRecord> stray{rr("zzz", "A:1", "A:1", 1, false)};
  try {
    compute_metrics(stray, gold);
    FAIL("expected MissingGold");
  } catch (const MissingGold& e) {
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
  }
  CHECK_THROWS_AS(compute_metrics(std::vector<RunRecord>{}, gold), EmptyRun);
  const std::vector<GoldAnnotation> dup{{"a", {"A:1"}}, {"a", {"A:2"}}};
  CHECK_THROWS_AS(compute_metrics(one, dup), SchemaError);
}

TEST_CASE("RunRecord from results") {
  LinkResult r;
  r.mention = "m";
  r.first_id = "A:1";
  r.final_id = "A:2";
  r.hops = 2;
  r.used_synonyms = true;
  auto rec1 = RunRecord::from(r);
  CHECK(rec1.y_first == "A:1");
  CHECK(rec1.y_final == "A:2");
  CHECK(rec1.hops == 2);
  r.error = "down";
  CHECK_FALSE(RunRecord::from(r).y_final.has_value());
}

TEST_CASE("random record sets agree with a naive recount") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<GoldAnnotation> gold;
    std::vector<RunRecord> rs;
    const auto pick = [&]() -> std::optional<std::string> {
      if (rng() % 5 == 0) return std::nullopt;
      return "A:" + std::to_string(rng() % 6);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto m = "m" + std::to_string(i);
      GoldAnnotation g{m, {}};
      for (int k = 0, nk = 1 + static_cast<int>(rng() % 3); k < nk; ++k) g.targets.push_back("A:" + std::to_string(rng() % 6));
      gold.push_back(g);
      const int hops = 1 + static_cast<int>(rng() % 2);
      const auto first = pick();
      rs.push_back(rr(m, first, hops == 1 ? first : pick(), hops, hops > 1 && rng() % 2 == 0));
    }
    std::shuffle(gold.begin(), gold.end(), rng);
    const auto rep = compute_metrics(rs, gold);
    const auto want = recount(rs, gold);
    CHECK(rep.m == n);
    CHECK(rep.acc1_overall == want.overall);
    CHECK(rep.acc1_first == want.first);
    CHECK(rep.acc1_final == want.final_);
    CHECK(rep.retry_rate == want.retry);
    CHECK(rep.synonym_rate == want.synonym);
    CHECK(rep.acc1_overall >= std::max(rep.acc1_first, rep.acc1_final));
    if (rep.retry_rate == 0.0) CHECK(rep.acc1_first == rep.acc1_final);
  }
}

TEST_CASE("label distribution arithmetic") {
  const auto labels = repeat({{DriftLabel::Exact_Match, 293},
                              {DriftLabel::Synonym_or_Lexical, 29},
                              {DriftLabel::Class_vs_Taxon, 18},
                              {DriftLabel::Model_Incorrect, 35},
                              {DriftLabel::Other, 6}});
  REQUIRE(labels.size() == 381);
  const auto d = label_distribution(labels);
  REQUIRE(d.size() == 5);
  CHECK(d[0].label == DriftLabel::Exact_Match);
  CHECK(d[0].count == 293);
  CHECK(d[0].percent == 76.9);
  CHECK(d[1].label == DriftLabel::Class_vs_Taxon);
  CHECK(d[1].percent == 4.7);
  CHECK(d[2].label == DriftLabel::Synonym_or_Lexical);
  CHECK(d[2].percent == 7.6);
  CHECK(d[3].label == DriftLabel::Model_Incorrect);
  CHECK(d[3].percent == 9.2);
  CHECK(d[4].percent == 1.6);

  CHECK(label_distribution(repeat({{DriftLabel::Hierarchy_Drift, 1}}))[0].percent == 100.0);
  CHECK(label_distribution(std::vector<DriftLabel>{}).empty());
  CHECK(percent_one_decimal(1, 8) == 12.5);
  CHECK(percent_one_decimal(1, 16) == 6.3);  // 6.25 rounds half-up
  CHECK(percent_one_decimal(0, 5) == 0.0);

  const auto j = distribution_to_json(d);
  CHECK(j.dump().find(R"("Exact_Match")") != std::string::npos);
}

TEST_CASE("drift label names") {
  for (const auto l : kAllDriftLabels) CHECK(parse_drift_label(to_string(l)) == l);
  CHECK_FALSE(parse_drift_label("Kinda_Close").has_value());
}

TEST_CASE("adjudication") {
  MockProvider p;
  p.set_adjudication("WALNUTS", "FOODON:03315475", {"NCBITaxon:16718", "Class_vs_Taxon"});
  const auto walnut = rec("FOODON:03315475", "walnut");
  const std::vector<EntityRecord> juglans{rec("NCBITaxon:16718", "Juglans")};
  const auto a = adjudicate(p, "WALNUTS", walnut, juglans);
  CHECK(a.label == DriftLabel::Class_vs_Taxon);
  CHECK(a.selected_gold == "NCBITaxon:16718");

  p.clear_calls();
  const auto same = adjudicate(p, "walnut", walnut, std::vector<EntityRecord>{juglans[0], walnut});
  CHECK(same.label == DriftLabel::Exact_Match);
  CHECK(same.selected_gold == "FOODON:03315475");
  CHECK(p.calls().empty());

  p.script(AgentRole::adjudicator, "q", R"({"selected_gold": "NCBITaxon:16718", "label": "Kinda_Close"})");
  CHECK(adjudicate(p, "q", walnut, juglans).label == DriftLabel::Other);
  p.script(AgentRole::adjudicator, "q", R"({"selected_gold": "FOODON:1", "label": "Hierarchy_Drift"})");
  const auto outside = adjudicate(p, "q", walnut, juglans);
  CHECK(outside.label == DriftLabel::Other);
  CHECK(outside.selected_gold == "NCBITaxon:16718");
  p.script(AgentRole::adjudicator, "q", "no verdict");
  CHECK(adjudicate(p, "q", walnut, juglans).label == DriftLabel::Other);
  p.fail(AgentRole::adjudicator, "q");
  CHECK_THROWS_AS(adjudicate(p, "q", walnut, juglans), ProviderError);
  CHECK_THROWS_AS(adjudicate(p, "q", walnut, std::vector<EntityRecord>{}), std::invalid_argument);
}

TEST_CASE("mismatch cases") {
  std::vector<LinkResult> results(4);
  results[0].mention = "a";
  results[0].final_id = "A:1";
  results[1].mention = "b";
  results[1].final_id = "A:9";
  results[2].mention = "c";
  results[3].mention = "d";
  results[3].final_id = "A:9";
  results[3].error = "x";
  const std::vector<GoldAnnotation> gold{{"a", {"A:1"}}, {"b", {"A:2", "A:3"}}, {"c", {"A:4"}}, {"d", {"A:5"}}};
  const auto cases = find_mismatches(results, gold);
  REQUIRE(cases.size() == 1);
  CHECK(cases[0].query == "b");
  CHECK(cases[0].gold == std::vector<std::string>{"A:2", "A:3"});

  std::stringstream buf;
  buf << case_to_json(cases[0]).dump() << "\n";
  const auto back = load_cases(buf);
  REQUIRE(back.size() == 1);
  CHECK(back[0].chosen == "A:9");
  CHECK(adjudication_to_json(cases[0], {DriftLabel::Other, "A:2", ""}).dump() ==
        R"({"query":"b","chosen":"A:9","selected_gold":"A:2","label":"Other"})");
}

TEST_CASE("gold loading") {
  std::istringstream ok(R"([{"mention": "a", "targets": ["FOODON:03302340", "NCBITaxon:16718"]}])");
  CHECK(load_gold(ok).at(0).targets.size() == 2);
  std::istringstream bad(R"([{"mention": "a", "targets": ["not a curie"]}])");
  CHECK_THROWS_AS(load_gold(bad), SchemaError);
}

TEST_CASE("comparison export") {
  CHECK(obo_purl("FOODON:03302340") == "http://purl.obolibrary.org/obo/FOODON_03302340");
  EntityRecord wwf = rec("FOODON:03302340", "whole wheat flour");
  wwf.synonyms = {"wholemeal flour", "graham flour"};
  const RecordStore store({wwf});

  std::vector<LinkResult> a(2);
  a[0].mention = "flour";
  a[0].final_id = "FOODON:03302340";
  a[1].mention = "nothing";
  const auto same = export_comparison(a, a, store, "A", "B");
  CHECK(same.at("format") == "ontolink-comparison");
  CHECK(same.at("system_a") == "A");
  REQUIRE(same.at("rows").size() == 2);
  for (const auto& row : same.at("rows")) CHECK(row.at("side_a") == row.at("side_b"));
  const auto& side = same.at("rows")[0].at("side_a");
  CHECK(side.at("purl") == "http://purl.obolibrary.org/obo/FOODON_03302340");
  CHECK(side.at("label") == "whole wheat flour");
  CHECK(side.at("synonyms").size() == 2);
  CHECK(same.at("rows")[1].at("side_a").at("curie") == "-1");
  CHECK(same.at("rows")[1].at("side_a").at("label").is_null());

  std::vector<LinkResult> b{a[0]};
  try {
    export_comparison(a, b, store);
    FAIL("expected MentionMismatch");
  } catch (const MentionMismatch& e) {
    CHECK(std::string(e.what()).find("nothing") != std::string::npos);
  }
}
