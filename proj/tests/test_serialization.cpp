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

#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "generators.hpp"
#include "preop/error.hpp"
#include "preop/serialization.hpp"

namespace preop {
namespace {

using nlohmann::json;

ResponseRecord random_record(gen::Rng& rng) {
    static const Reply kReplies[] = {Reply::yes, Reply::no, Reply::absent};
    ResponseRecord r;
    r.scenario_id = fmt::format("{:02d}", rng.uniform(1, 14));
    r.system = rng.coin() ? SystemId{"GPT4", KnowledgeBase::international}
                          : SystemId{"Llama3-8b", KnowledgeBase::local};
    r.repeat_index = static_cast<int>(rng.uniform(1, 4));
    r.delay_answer = kReplies[rng.uniform(0, 2)];
    r.carbo_answer = kReplies[rng.uniform(0, 2)];
    if (rng.coin()) r.triage_answer = rng.coin() ? Triage::doctor : Triage::nurse;
    for (auto c : kCategories) {
        if (rng.coin(0.8)) {
            auto& labels = r.matched_items[c];
            for (auto n = rng.uniform(0, 3); n > 0; --n) labels.push_back(gen::word(rng));
        }
    }
    if (rng.coin(0.2)) r.hallucination_hits.push_back(gen::word(rng));
    return r;
}

bool same(const ResponseRecord& a, const ResponseRecord& b) {
    return a.scenario_id == b.scenario_id && a.system == b.system &&
           a.repeat_index == b.repeat_index && a.delay_answer == b.delay_answer &&
           a.triage_answer == b.triage_answer && a.carbo_answer == b.carbo_answer &&
           a.matched_items == b.matched_items && a.hallucination_hits == b.hallucination_hits;
}

TEST(Serialization, ResponseRecordRoundTripProperty) {
    gen::Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto r = random_record(rng);
        const auto back = json::parse(json(r).dump()).get<ResponseRecord>();
        EXPECT_TRUE(same(r, back)) << json(r).dump();
    }
}

TEST(Serialization, ResponseRecordDefaults) {
    const auto r = json::parse(R"({"scenario_id":"03","system":"HumanDoctor"})").get<ResponseRecord>();
    EXPECT_EQ(r.repeat_index, 1);
    EXPECT_EQ(r.delay_answer, Reply::absent);
    EXPECT_FALSE(r.triage_answer);
    EXPECT_TRUE(r.matched_items.empty());
    EXPECT_THROW(json::parse(R"({"scenario_id":"03","system":"X","delay_answer":"maybe"})").get<ResponseRecord>(),
                 InvalidInput);
    EXPECT_THROW(json::parse(R"({"system":"X"})").get<ResponseRecord>(), json::exception);
}

TEST(Serialization, AnswerKeyRoundTrip) {
    AnswerKey k;
    k.scenario_id = "09";
    k.delay_required = DelayRequirement::either;
    k.triage_expected = Triage::nurse;
    k.carbo_loading = true;
    for (auto c : kCategories) k.category_items[c] = {};
    k.category_items[Category::medications] = {{"metformin", {"metformin", "glucophage"}}};
    k.critical_error_patterns = {"stop aspirin"};
    const auto back = json::parse(json(k).dump()).get<AnswerKey>();
    EXPECT_EQ(back.scenario_id, "09");
    EXPECT_EQ(back.delay_required, DelayRequirement::either);
    EXPECT_EQ(back.triage_expected, Triage::nurse);
    EXPECT_TRUE(back.carbo_loading);
    EXPECT_EQ(back.category_items.size(), 4u);
    EXPECT_EQ(back.category_items.at(Category::medications)[0].patterns.size(), 2u);
    EXPECT_EQ(back.critical_error_patterns, k.critical_error_patterns);
}

TEST(Serialization, KeyItemAcceptsSinglePatternString) {
    const auto item = json::parse(R"({"label":"x","patterns":"a|b"})").get<KeyItem>();
    EXPECT_EQ(item.patterns, std::vector<std::string>{"a|b"});
}

TEST(Serialization, GradeRoundTrip) {
    Grade g;
    g.fitness_correct = true;
    g.triage_correct = false;
    g.carbo_correct = true;
    for (double t : kThresholds) {
        ThresholdGrade tg;
        tg.threshold = t;
        tg.overall_correct = t < 0.8;
        tg.categories = {{Category::fasting, Verdict::correct},
                         {Category::medications, Verdict::na},
                         {Category::team_instructions, Verdict::wrong},
                         {Category::optimizations, Verdict::correct}};
        g.by_threshold.push_back(tg);
    }
    const auto j = json(g);
    const auto back = json::parse(j.dump()).get<Grade>();
    EXPECT_EQ(json(back), j);
    EXPECT_EQ(back.triage_correct, false);
    EXPECT_EQ(back.at(0.85).categories.at(Category::team_instructions), Verdict::wrong);

    g.triage_correct.reset();
    EXPECT_TRUE(json(g)["triage_correct"].is_null());
    EXPECT_FALSE(json::parse(json(g).dump()).get<Grade>().triage_correct);

    auto bad = j;
    bad["thresholds"][0]["categories"]["fasting"] = "maybe";
    EXPECT_THROW(bad.get<Grade>(), InvalidInput);
}

}  // namespace
}  // namespace preop
