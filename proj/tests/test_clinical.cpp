// Copyright 2026-present the preop-rag project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "generators.hpp"
#include "preop/clinical.hpp"
#include "preop/error.hpp"

namespace preop {
namespace {

const std::string kFixtures = PREOP_FIXTURES;
const SystemId kGpt4Intl{"GPT4", KnowledgeBase::international};
const SystemId kLlamaLocal{"Llama3-8b", KnowledgeBase::local};

std::string fixture_response(const std::string& system, const std::string& scenario, int repeat) {
    std::ifstream in(kFixtures + "/replay/responses.jsonl");
    for (std::string line; std::getline(in, line);) {
        const auto j = nlohmann::json::parse(line);
        if (j["system"] == system && j["scenario_id"] == scenario && j["repeat_index"] == repeat) {
            return j["text"];
        }
    }
    throw std::runtime_error("fixture response missing");
}

AnswerKey fixture_key(const std::string& id) {
    for (auto& k : load_answer_keys(kFixtures + "/answer_keys.json")) {
        if (k.scenario_id == id) return k;
    }
    throw std::runtime_error("fixture key missing");
}

Scenario base_scenario() {
    Scenario s;
    s.id = "x";
    s.age = 40;
    s.asa_class = 2;
    s.surgery_risk = SurgeryRisk::intermediate;
    s.free_text = "note";
    return s;
}

AnswerKey simple_key() {
    AnswerKey k;
    k.scenario_id = "s";
    k.delay_required = DelayRequirement::no;
    k.triage_expected = Triage::nurse;
    k.carbo_loading = true;
    k.category_items[Category::fasting] = {{"solids", {"six hours"}}, {"fluids", {"two hours"}}};
    k.category_items[Category::medications] = {};
    k.category_items[Category::team_instructions] = {
        {"a", {"alpha"}}, {"b", {"bravo"}}, {"c", {"charlie"}}, {"d", {"delta"}}};
    k.category_items[Category::optimizations] = {{"sugar", {"glucose|hba1c"}}};
    k.critical_error_patterns = {"stop all medication"};
    return k;
}

ResponseRecord perfect_record(const AnswerKey& k, const SystemId& system) {
    ResponseRecord r;
    r.scenario_id = k.scenario_id;
    r.system = system;
    r.delay_answer = k.delay_required == DelayRequirement::yes ? Reply::yes : Reply::no;
    r.triage_answer = k.triage_expected;
    r.carbo_answer = k.carbo_loading ? Reply::yes : Reply::no;
    for (const auto& [c, items] : k.category_items) {
        for (const auto& i : items) r.matched_items[c].push_back(i.label);
    }
    return r;
}

TEST(Triage, NurseOnlyWhenEveryConditionHolds) {
    EXPECT_EQ(triage_rule(base_scenario()), Triage::nurse);
    for (int asa = 1; asa <= 5; ++asa) {
        for (int age : {1, 21, 22, 80}) {
            for (auto risk : {SurgeryRisk::low, SurgeryRisk::intermediate, SurgeryRisk::high}) {
                for (bool inv : {false, true}) {
                    for (bool comp : {false, true}) {
                        auto s = base_scenario();
                        s.asa_class = asa;
                        s.age = age;
                        s.surgery_risk = risk;
                        s.investigations_abnormal = inv;
                        s.complication_risk_high = comp;
                        int blockers = (asa > 2) + (age <= 21) + (risk == SurgeryRisk::high) + inv + comp;
                        EXPECT_EQ(triage_rule(s), blockers == 0 ? Triage::nurse : Triage::doctor)
                            << asa << ' ' << age << ' ' << inv << comp;
                    }
                }
            }
        }
    }
}

TEST(Triage, GradedForNativeAndLocalSystemsOnly) {
    EXPECT_TRUE(triage_graded(kLlamaLocal));
    EXPECT_TRUE(triage_graded(SystemId{"Gemini", KnowledgeBase::none}));
    EXPECT_FALSE(triage_graded(kGpt4Intl));
    EXPECT_FALSE(triage_graded(SystemId::parse("HumanDoctor")));
}

TEST(Extraction, SplitsNumberedComponents) {
    const auto parts = split_components("<ol> 1. first part 2) second 3. third 10. x 8. last");
    ASSERT_EQ(parts.size(), 4u);
    EXPECT_EQ(parts.at(1), "first part");
    EXPECT_EQ(parts.at(2), "second");
    EXPECT_EQ(parts.at(3), "third 10. x");
    EXPECT_EQ(parts.at(8), "last");
    EXPECT_TRUE(split_components("no markers here, 2.5 mg").empty());
}

TEST(Extraction, ReadsTheWorkedExampleResponse) {
    const auto key = fixture_key("01");
    const auto text = fixture_response("GPT4_international", "01", 1);
    const auto r = extract_record(text, key, kGpt4Intl, 1);
    EXPECT_EQ(r.triage_answer, Triage::doctor);
    EXPECT_EQ(r.carbo_answer, Reply::no);
    EXPECT_EQ(r.delay_answer, Reply::yes);
    EXPECT_TRUE(r.hallucination_hits.empty());
    EXPECT_EQ(r.matched_items.at(Category::fasting).size(), 2u);
    EXPECT_EQ(r.matched_items.at(Category::medications), std::vector<std::string>{"ventolin"});
    EXPECT_EQ(r.matched_items.at(Category::team_instructions),
              (std::vector<std::string>{"hypocount", "bring CPAP", "post-op HD"}));
    EXPECT_EQ(r.matched_items.at(Category::optimizations).size(), 1u);

    const auto g = grade(r, key);
    EXPECT_TRUE(g.fitness_correct);
    EXPECT_TRUE(g.carbo_correct);
    EXPECT_FALSE(g.triage_correct.has_value());
    // Three of four team items: enough at 65% and 75%, not at 85%.
    EXPECT_EQ(g.at(0.65).categories.at(Category::team_instructions), Verdict::correct);
    EXPECT_EQ(g.at(0.75).categories.at(Category::team_instructions), Verdict::correct);
    EXPECT_EQ(g.at(0.85).categories.at(Category::team_instructions), Verdict::wrong);
    EXPECT_TRUE(g.at(0.75).overall_correct);
    // 4 of 5 graded aspects at 85%.
    EXPECT_FALSE(g.at(0.85).overall_correct);
}

TEST(Extraction, FallsBackToSentencesWithoutNumbering) {
    auto key = simple_key();
    const auto r = extract_record(
        "A nurse can see this patient. Carbohydrate loading is suitable. The operation can proceed "
        "as planned. Fast six hours for food.",
        key, kLlamaLocal, 2);
    EXPECT_EQ(r.repeat_index, 2);
    EXPECT_EQ(r.triage_answer, Triage::nurse);
    EXPECT_EQ(r.carbo_answer, Reply::yes);
    EXPECT_EQ(r.delay_answer, Reply::no);
    EXPECT_EQ(r.matched_items.at(Category::fasting), std::vector<std::string>{"solids"});
}

TEST(Extraction, AbsentAnswers) {
    const auto r = extract_record("Nothing useful.", simple_key(), kLlamaLocal, 1);
    EXPECT_FALSE(r.triage_answer);
    EXPECT_EQ(r.carbo_answer, Reply::absent);
    EXPECT_EQ(r.delay_answer, Reply::absent);
}

TEST(Extraction, HallucinationPatternsAreCaseInsensitive) {
    const auto r = extract_record("Please STOP ALL MEDICATION now.", simple_key(), kLlamaLocal, 1);
    EXPECT_EQ(r.hallucination_hits, std::vector<std::string>{"stop all medication"});
}

TEST(Extraction, BadPatternIsReported) {
    auto key = simple_key();
    key.critical_error_patterns = {"("};
    EXPECT_THROW(extract_record("x", key, kLlamaLocal, 1), InvalidInput);
}

TEST(Grading, PerfectRecordIsCorrectEverywhere) {
    const auto key = simple_key();
    const auto g = grade(perfect_record(key, kLlamaLocal), key);
    EXPECT_TRUE(g.fitness_correct);
    EXPECT_EQ(g.triage_correct, true);
    EXPECT_TRUE(g.carbo_correct);
    EXPECT_FALSE(g.hallucination);
    ASSERT_EQ(g.by_threshold.size(), 3u);
    for (const auto& t : g.by_threshold) {
        EXPECT_TRUE(t.overall_correct);
        EXPECT_EQ(t.categories.at(Category::medications), Verdict::na);
        EXPECT_EQ(t.categories.at(Category::fasting), Verdict::correct);
    }
}

TEST(Grading, HallucinationForcesEveryFlagFalse) {
    const auto key = simple_key();
    auto r = perfect_record(key, kLlamaLocal);
    r.hallucination_hits = {"stop all medication"};
    const auto g = grade(r, key);
    EXPECT_TRUE(g.hallucination);
    EXPECT_FALSE(g.fitness_correct);
    EXPECT_EQ(g.triage_correct, false);
    EXPECT_FALSE(g.carbo_correct);
    for (const auto& t : g.by_threshold) {
        EXPECT_FALSE(t.overall_correct);
        for (const auto& [c, v] : t.categories) EXPECT_NE(v, Verdict::correct);
    }
}

TEST(Grading, EitherAcceptsYesOrNo) {
    auto key = simple_key();
    key.delay_required = DelayRequirement::either;
    auto r = perfect_record(key, kLlamaLocal);
    for (auto reply : {Reply::yes, Reply::no}) {
        r.delay_answer = reply;
        EXPECT_TRUE(grade(r, key).fitness_correct);
    }
    r.delay_answer = Reply::absent;
    EXPECT_FALSE(grade(r, key).fitness_correct);
}

TEST(Grading, DelayMustMatchKey) {
    auto key = simple_key();
    auto r = perfect_record(key, kLlamaLocal);
    r.delay_answer = Reply::yes;
    EXPECT_FALSE(grade(r, key).fitness_correct);
    key.delay_required = DelayRequirement::yes;
    EXPECT_TRUE(grade(r, key).fitness_correct);
}

TEST(Grading, CarbohydrateLoadingCountsTowardOverall) {
    auto key = simple_key();
    auto r = perfect_record(key, kLlamaLocal);
    r.carbo_answer = Reply::absent;
    const auto g = grade(r, key);
    EXPECT_FALSE(g.carbo_correct);
    // 3 of 4 graded aspects (fasting, team, optimizations, carbohydrate loading).
    EXPECT_TRUE(g.at(0.75).overall_correct);
    EXPECT_FALSE(g.at(0.85).overall_correct);
}

TEST(Grading, RejectsMismatchedKeyAndBadThreshold) {
    const auto key = simple_key();
    auto r = perfect_record(key, kLlamaLocal);
    EXPECT_THROW(grade(r, key, 0.0), InvalidInput);
    EXPECT_THROW(grade(r, key, 1.5), InvalidInput);
    EXPECT_THROW(grade(r, key).at(0.5), NotFound);
    r.scenario_id = "other";
    EXPECT_THROW(grade(r, key), InvalidInput);
}

// Raising the threshold never turns a wrong verdict into a correct one.
TEST(Grading, ThresholdMonotonicityProperty) {
    gen::Rng rng(75);
    for (int trial = 0; trial < 2000; ++trial) {
        AnswerKey key;
        key.scenario_id = "p";
        key.carbo_loading = rng.coin();
        for (auto c : kCategories) {
            for (auto n = rng.uniform(0, 6), i = std::size_t{0}; i < n; ++i) {
                key.category_items[c].push_back({fmt::format("i{}", i), {"x"}});
            }
        }
        ResponseRecord r;
        r.scenario_id = "p";
        r.system = kLlamaLocal;
        r.carbo_answer = rng.coin() ? Reply::yes : Reply::no;
        for (const auto& [c, items] : key.category_items) {
            for (const auto& i : items) {
                if (rng.coin()) r.matched_items[c].push_back(i.label);
            }
        }
        if (rng.coin(0.05)) r.hallucination_hits = {"x"};
        std::vector<double> ts;
        for (int i = 0; i < 5; ++i) ts.push_back(rng.real(0.01, 1.0));
        std::sort(ts.begin(), ts.end());
        const auto g = grade(r, key, ts);
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const auto& lo = g.by_threshold[i - 1];
            const auto& hi = g.by_threshold[i];
            EXPECT_LE(hi.overall_correct, lo.overall_correct);
            for (auto c : kCategories) {
                EXPECT_LE(hi.categories.at(c) == Verdict::correct, lo.categories.at(c) == Verdict::correct);
                EXPECT_EQ(hi.categories.at(c) == Verdict::na, key.category_items[c].empty());
            }
        }
        // Independent recount of the overall verdict at each threshold.
        for (const auto& tg : g.by_threshold) {
            int graded = 1, correct = g.carbo_correct;
            for (auto c : kCategories) {
                const auto& items = key.category_items[c];
                if (items.empty()) continue;
                ++graded;
                const auto hit = r.matched_items.count(c) ? r.matched_items.at(c).size() : 0;
                correct += r.hallucination_hits.empty() && hit >= tg.threshold * items.size();
            }
            EXPECT_EQ(tg.overall_correct, r.hallucination_hits.empty() && correct >= tg.threshold * graded);
        }
    }
}

TEST(Scenarios, ParsesHeaderAndBody) {
    const auto s = parse_scenario(
        "id: 07\nage: 64\nasa_class: 3\nsurgery_risk: High\ninvestigations_abnormal: no\n"
        "complication_risk_high: yes\n\nLine one\nLine two\n\n",
        "mem");
    EXPECT_EQ(s.id, "07");
    EXPECT_EQ(s.age, 64);
    EXPECT_EQ(s.asa_class, 3);
    EXPECT_EQ(s.surgery_risk, SurgeryRisk::high);
    EXPECT_FALSE(s.investigations_abnormal);
    EXPECT_TRUE(s.complication_risk_high);
    EXPECT_EQ(s.free_text, "Line one\nLine two");
}

TEST(Scenarios, RejectsMalformedFiles) {
    const std::string good =
        "id: 1\nage: 5\nasa_class: 1\nsurgery_risk: low\ninvestigations_abnormal: no\n"
        "complication_risk_high: no\n";
    EXPECT_NO_THROW(parse_scenario(good + "\nbody", "m"));
    EXPECT_THROW(parse_scenario(good, "m"), InvalidInput);
    EXPECT_THROW(parse_scenario(good + "\n  \n", "m"), InvalidInput);
    EXPECT_THROW(parse_scenario("id 1\n\nbody", "m"), InvalidInput);
    EXPECT_THROW(parse_scenario("id: 1\n\nbody", "m"), InvalidInput);
    auto bad_asa = good;
    bad_asa.replace(bad_asa.find("asa_class: 1"), 12, "asa_class: 6");
    EXPECT_THROW(parse_scenario(bad_asa + "\nbody", "m"), InvalidInput);
    auto bad_risk = good;
    bad_risk.replace(bad_risk.find("low"), 3, "mild");
    EXPECT_THROW(parse_scenario(bad_risk + "\nbody", "m"), InvalidInput);
    auto bad_age = good;
    bad_age.replace(bad_age.find("age: 5"), 6, "age: x");
    EXPECT_THROW(parse_scenario(bad_age + "\nbody", "m"), InvalidInput);
}

TEST(Scenarios, FixtureSet) {
    const auto scenarios = load_scenarios(kFixtures + "/scenarios");
    ASSERT_EQ(scenarios.size(), 14u);
    EXPECT_EQ(scenarios[0].id, "01");
    EXPECT_EQ(scenarios[0].asa_class, 3);
    EXPECT_EQ(triage_rule(scenarios[0]), Triage::doctor);
    const auto keys = load_answer_keys(kFixtures + "/answer_keys.json");
    ASSERT_EQ(keys.size(), 14u);
    // Every fixture key agrees with the triage rule applied to its scenario.
    for (std::size_t i = 0; i < keys.size(); ++i) {
        EXPECT_EQ(keys[i].scenario_id, scenarios[i].id);
        EXPECT_EQ(keys[i].triage_expected, triage_rule(scenarios[i])) << scenarios[i].id;
    }
}

TEST(AnswerKeys, Validation) {
    auto k = simple_key();
    EXPECT_NO_THROW(k.validate());
    k.category_items.erase(Category::medications);
    EXPECT_THROW(k.validate(), InvalidInput);
    k = simple_key();
    k.category_items[Category::fasting].push_back({"empty", {}});
    EXPECT_THROW(k.validate(), InvalidInput);
    k = simple_key();
    k.scenario_id.clear();
    EXPECT_THROW(k.validate(), InvalidInput);
}

TEST(Enums, StringRoundTrips) {
    for (auto c : kCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    for (auto v : {Reply::yes, Reply::no, Reply::absent}) EXPECT_EQ(parse_reply(to_string(v)), v);
    for (auto v : {DelayRequirement::yes, DelayRequirement::no, DelayRequirement::either}) {
        EXPECT_EQ(parse_delay_requirement(to_string(v)), v);
    }
    EXPECT_EQ(parse_triage(" Nurse "), Triage::nurse);
    EXPECT_THROW(parse_triage("surgeon"), InvalidInput);
    EXPECT_THROW(parse_category("diet"), InvalidInput);
}

}  // namespace
}  // namespace preop
