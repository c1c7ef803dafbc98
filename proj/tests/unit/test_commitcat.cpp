// Copyright 2026 The RANalyzer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <set>

#include "ranalyzer/commitcat.hpp"
#include "ranalyzer/error.hpp"
#include "ranalyzer/rng.hpp"

using namespace ranalyzer;
using namespace ranalyzer::commitcat;

namespace {

CategoryMask mask(std::initializer_list<Category> cats) {
  CategoryMask m;
  for (auto c : cats) m.set(index_of(c));
  return m;
}

CategoryMask layers_only(CategoryMask m) {
  for (std::size_t i = kNumLayers; i < kNumCategories; ++i) m.reset(i);
  return m;
}

CategorizationResult run(const std::string& message) {
  CommitText c;
  c.message = message;
  return categorize_keywords(c, default_keyword_rules());
}

}  // namespace

TEST_SUITE("commitcat") {
  TEST_CASE("category vocabulary is fixed") {
    CHECK(kNumLayers == 9);
    CHECK(kNumComponents == 6);
    CHECK(category_name(Category::PHY) == "PHY");
    CHECK(category_name(Category::queue) == "queue");
    CHECK(category_from_name("pdcp") == Category::PDCP);
    CHECK_FALSE(category_from_name("LTE").has_value());
    CHECK(is_layer(Category::E1AP));
    CHECK_FALSE(is_layer(Category::memory));
  }

  TEST_CASE("strength weights") {
    CHECK(weight(Strength::strong) == 2.0);
    CHECK(weight(Strength::medium) == 1.0);
    CHECK(weight(Strength::weak) == 0.5);
  }

  TEST_CASE("shipped rules map the worked commit titles to their layers") {
    const std::vector<std::pair<std::string, CategoryMask>> cases{
        {"fix duplicate call of RCconfig_NR_L1", mask({Category::PHY})},
        {"Support RC SM aperiodic subscription for \"UE RRC State Change\"", mask({Category::RRC})},
        {"use pointer to structure instead of module_id inside MAC", mask({Category::MAC})},
        {"NR UE MSG3 buffer", mask({Category::MAC})},
        {"Sidelink configuration passed from RRC->MAC", mask({Category::RRC, Category::MAC})},
        {"reworking configuration of LogicalChannelConfig at MAC UE", mask({Category::MAC})},
        {"L1 tx thread", mask({Category::PHY})},
    };
    for (const auto& [msg, expected] : cases) {
      INFO(msg);
      CHECK(layers_only(run(msg).affected) == expected);
    }
  }

  TEST_CASE("MSG3 buffer reaches the MAC threshold") {
    const auto& rules = default_keyword_rules();
    CHECK(keyword_score("NR UE MSG3 buffer", rules, Category::MAC) >= 2.0);
    CHECK(run("NR UE MSG3 buffer").affected[index_of(Category::MAC)]);
  }

  TEST_CASE("L1 tx thread also touches threading") {
    const auto r = run("L1 tx thread");
    CHECK(r.affected[index_of(Category::PHY)]);
    CHECK(r.affected[index_of(Category::threading)]);
  }

  TEST_CASE("empty message scores zero everywhere") {
    const auto& rules = default_keyword_rules();
    for (std::size_t i = 0; i < kNumCategories; ++i) CHECK(keyword_score("", rules, category_at(i)) == 0.0);
    const auto r = run("");
    CHECK(r.affected.none());
    CHECK(r.confidence == Confidence::low);
  }

  TEST_CASE("a keyword counts once however often it occurs") {
    const auto& rules = default_keyword_rules();
    CHECK(keyword_score("buffer", rules, Category::memory) == 0.5);
    CHECK(keyword_score("buffer then buffer again", rules, Category::memory) == 0.5);
    CHECK(keyword_score("HARQ HARQ harq", rules, Category::MAC) == 2.0);
  }

  TEST_CASE("distinct keyword recount oracle") {
    const auto& rules = default_keyword_rules();
    const std::string msg = "fix RLC segmentation and RLC reassembly in pdcp ciphering path";
    std::string lowered;
    for (char ch : msg) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (std::size_t i = 0; i < kNumCategories; ++i) {
      std::set<std::string> seen;
      double expect = 0.0;
      for (const auto& r : rules.keywords)
        if (r.category == category_at(i) && lowered.find(r.keyword) != std::string::npos && seen.insert(r.keyword).second)
          expect += weight(r.strength);
      CHECK(keyword_score(msg, rules, category_at(i)) == expect);
    }
  }

  TEST_CASE("confidence rule examples") {
    CHECK(confidence_rule(1, 0, 2, 1) == Confidence::high);
    CHECK(confidence_rule(0, 1, 0.5, 0) == Confidence::low);
    CHECK(confidence_rule(5, 1, 3, 2) == Confidence::medium);
    CHECK(confidence_rule(2, 2, 2, 1) == Confidence::high);
    CHECK(confidence_rule(2, 3, 2, 1) == Confidence::medium);
    CHECK(confidence_rule(1, 0, 1, 0) == Confidence::medium);
  }

  TEST_CASE("buffer-only commit is a low-confidence memory draft") {
    const auto r = run("remove a useless copy and specific buffer for all UE UL payload");
    CHECK(r.affected == mask({Category::memory}));
    CHECK(r.confidence == Confidence::low);
  }

  TEST_CASE("change type detection and tie-break") {
    const auto& rules = default_keyword_rules();
    CHECK(detect_change_type("fix crash in scheduler", rules) == ChangeType::bugfix);
    CHECK(detect_change_type("improve performance, make it faster", rules) == ChangeType::optimization);
    CHECK(detect_change_type("support new numerology", rules) == ChangeType::feature);
    CHECK(detect_change_type("refactor module layout", rules) == ChangeType::refactoring);
    CHECK(detect_change_type("nothing matching here", rules) == ChangeType::refactoring);
    // one bugfix and one feature keyword: bugfix wins the tie
    CHECK(detect_change_type("fix and support", rules) == ChangeType::bugfix);
  }

  TEST_CASE("appending a matching keyword never lowers a score") {
    const auto& rules = default_keyword_rules();
    std::vector<std::string> vocab;
    for (const auto& r : rules.keywords) vocab.push_back(r.keyword);
    for (const char* w : {"the", "update", "value", "path"}) vocab.emplace_back(w);
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      std::string msg;
      const auto words = 1 + rng.below(6);
      for (std::uint64_t w = 0; w < words; ++w) msg += vocab[rng.below(vocab.size())] + " ";
      const auto before = run(msg);
      const auto extra = rules.keywords[rng.below(rules.keywords.size())].keyword;
      const auto after = run(msg + extra);
      for (std::size_t i = 0; i < kNumCategories; ++i) CHECK(after.scores[i] >= before.scores[i]);
      CHECK((before.affected & ~after.affected).none());
    }
  }

  TEST_CASE("keyword stage is deterministic") {
    const auto a = run("Sidelink configuration passed from RRC->MAC");
    const auto b = run("Sidelink configuration passed from RRC->MAC");
    CHECK(a == b);
  }

  TEST_CASE("feature vector layout") {
    CHECK(feature_names().size() == 34);
    CHECK(feature_names()[0] == "cat_PHY");
    CHECK(feature_names()[33] == "merge_ref_count");
    CategorizationResult r;
    r.affected = mask({Category::PHY, Category::MAC});
    CommitText c;
    c.hash = "abc1234";
    c.message = "x";
    const auto f = build_feature_vector(r, c);
    CHECK(f.values[0] == 1.0);
    CHECK(f.values[1] == 1.0);
    for (std::size_t i = 2; i < kNumCategories; ++i) CHECK(f.values[i] == 0.0);
  }

  TEST_CASE("zero-churn commit: complexity from categories only") {
    CategorizationResult r;
    r.affected = mask({Category::PHY, Category::MAC, Category::memory});
    CommitText c;
    c.message = "PHY MAC";
    const auto v = decode(build_feature_vector(r, c));
    CHECK(v.total_churn == 0.0);
    CHECK(v.complexity == doctest::Approx(0.3 * 3.0 / 15.0).epsilon(1e-15));
  }

  TEST_CASE("complexity formula") {
    CHECK(complexity_score(500, 1, 1, 25) == doctest::Approx(0.4 * 0.5 + 0.3 * 2.0 / 15.0 + 0.3 * 0.5));
    CHECK(complexity_score(5000, 9, 6, 500) == doctest::Approx(1.0));
  }

  TEST_CASE("merge request references") {
    CHECK(merge_ref_count("Merge !2557 and !2556 into develop") == 2);
    CHECK(merge_ref_count("nothing") == 0);
  }

  TEST_CASE("decode then encode is the identity") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      FeatureView v;
      for (std::size_t i = 0; i < kNumCategories; ++i) v.affected[i] = rng.uniform() < 0.3;
      v.change_type = static_cast<ChangeType>(rng.below(4));
      v.confidence = static_cast<Confidence>(rng.below(3));
      v.layers = static_cast<double>(layer_count(v.affected));
      v.components = static_cast<double>(component_count(v.affected));
      v.files_changed = static_cast<double>(rng.below(40));
      v.lines_added = static_cast<double>(rng.below(900));
      v.lines_deleted = static_cast<double>(rng.below(900));
      v.total_churn = v.lines_added + v.lines_deleted;
      v.complexity = rng.uniform();
      v.refined_by_llm = rng.uniform() < 0.5;
      v.evidence = 0.5 * static_cast<double>(rng.below(12));
      v.strong_matches = static_cast<double>(rng.below(4));
      v.message_length = static_cast<double>(rng.below(300));
      v.merge_refs = static_cast<double>(rng.below(3));
      const auto f = encode("h", v);
      const auto g = encode("h", decode(f));
      CHECK(f == g);
      double type_sum = 0, conf_sum = 0;
      for (std::size_t i = 15; i < 19; ++i) type_sum += f.values[i];
      for (std::size_t i = 26; i < 29; ++i) conf_sum += f.values[i];
      CHECK(type_sum == 1.0);
      CHECK(conf_sum == 1.0);
    }
  }

  TEST_CASE("decode rejects malformed vectors") {
    FeatureView v;
    auto f = encode("h", v);
    auto bad = f;
    bad.values[3] = 0.5;
    CHECK_THROWS_AS(decode(bad), DataError);
    bad = f;
    bad.values[16] = 1.0;  // two change types
    CHECK_THROWS_AS(decode(bad), DataError);
    bad = f;
    bad.values[26] = 0.0;
    bad.values[28] = 0.0;  // no confidence
    CHECK_THROWS_AS(decode(bad), DataError);
  }

  TEST_CASE("rule file grammar") {
    const auto rules = parse_keyword_rules(
        "# comment\n"
        "kw MAC strong \"random access\"\n"
        "kw memory weak leak\n"
        "theta memory 0.5\n"
        "type bugfix oops\n"
        "confidence high_min_evidence 3\n"
        "complexity churn_cap 10\n");
    REQUIRE(rules.keywords.size() == 2);
    CHECK(rules.keywords[0].keyword == "random access");
    CHECK(rules.thresholds[index_of(Category::memory)] == 0.5);
    CHECK(rules.thresholds[index_of(Category::MAC)] == 1.0);
    CHECK(rules.confidence.high_min_evidence == 3.0);
    CHECK(rules.complexity.churn_cap == 10.0);
    CHECK(detect_change_type("oops", rules) == ChangeType::bugfix);
    CommitText c;
    c.message = "memory leak";
    CHECK(categorize_keywords(c, rules).affected == mask({Category::memory}));
  }

  TEST_CASE("rule file errors") {
    CHECK_THROWS_AS(parse_keyword_rules("kw LTE strong x\n"), ConfigError);
    CHECK_THROWS_AS(parse_keyword_rules("kw MAC mighty x\n"), ConfigError);
    CHECK_THROWS_AS(parse_keyword_rules("theta MAC abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_keyword_rules("frobnicate\n"), ConfigError);
    CHECK_THROWS_AS(parse_keyword_rules("kw MAC strong\n"), ConfigError);
  }

  TEST_CASE("every category has default keywords") {
    std::set<std::size_t> covered;
    for (const auto& r : default_keyword_rules().keywords) covered.insert(index_of(r.category));
    CHECK(covered.size() == kNumCategories);
  }
}
