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

#include "preop/serialization.hpp"

#include <fmt/format.h>

#include "preop/error.hpp"

namespace preop {

using nlohmann::json;

void to_json(json& j, const KeyItem& v) { j = json{{"label", v.label}, {"patterns", v.patterns}}; }

void from_json(const json& j, KeyItem& v) {
    j.at("label").get_to(v.label);
    if (j.at("patterns").is_string()) {
        v.patterns = {j.at("patterns").get<std::string>()};
    } else {
        j.at("patterns").get_to(v.patterns);
    }
}

void to_json(json& j, const AnswerKey& v) {
    json cats = json::object();
    for (const auto& [c, items] : v.category_items) cats[std::string(to_string(c))] = items;
    j = json{{"scenario_id", v.scenario_id},
             {"delay_required", to_string(v.delay_required)},
             {"triage_expected", to_string(v.triage_expected)},
             {"carbo_loading", v.carbo_loading},
             {"categories", cats},
             {"critical_error_patterns", v.critical_error_patterns}};
}

void from_json(const json& j, AnswerKey& v) {
    v.scenario_id = j.at("scenario_id").get<std::string>();
    v.delay_required = parse_delay_requirement(j.at("delay_required").get<std::string>());
    v.triage_expected = parse_triage(j.at("triage_expected").get<std::string>());
    v.carbo_loading = j.at("carbo_loading").get<bool>();
    v.category_items.clear();
    const auto& cats = j.at("categories");
    for (auto it = cats.begin(); it != cats.end(); ++it) {
        v.category_items[parse_category(it.key())] = it.value().get<std::vector<KeyItem>>();
    }
    v.critical_error_patterns =
        j.value("critical_error_patterns", std::vector<std::string>{});
}

void to_json(json& j, const ResponseRecord& v) {
    json matched = json::object();
    for (const auto& [c, labels] : v.matched_items) matched[std::string(to_string(c))] = labels;
    j = json{{"scenario_id", v.scenario_id},
             {"system", v.system.name()},
             {"repeat_index", v.repeat_index},
             {"delay_answer", to_string(v.delay_answer)},
             {"triage_answer", v.triage_answer ? json(to_string(*v.triage_answer)) : json("absent")},
             {"carbo_answer", to_string(v.carbo_answer)},
             {"matched_items", matched},
             {"hallucination_hits", v.hallucination_hits}};
}

void from_json(const json& j, ResponseRecord& v) {
    v.scenario_id = j.at("scenario_id").get<std::string>();
    v.system = SystemId::parse(j.at("system").get<std::string>());
    v.repeat_index = j.value("repeat_index", 1);
    v.delay_answer = parse_reply(j.value("delay_answer", std::string("absent")));
    const auto triage = j.value("triage_answer", std::string("absent"));
    v.triage_answer =
        triage == "absent" ? std::nullopt : std::optional<Triage>(parse_triage(triage));
    v.carbo_answer = parse_reply(j.value("carbo_answer", std::string("absent")));
    v.matched_items.clear();
    if (j.contains("matched_items")) {
        const auto& m = j.at("matched_items");
        for (auto it = m.begin(); it != m.end(); ++it) {
            v.matched_items[parse_category(it.key())] = it.value().get<std::vector<std::string>>();
        }
    }
    v.hallucination_hits = j.value("hallucination_hits", std::vector<std::string>{});
}

void to_json(json& j, const Grade& v) {
    json levels = json::array();
    for (const auto& tg : v.by_threshold) {
        json cats = json::object();
        for (const auto& [c, verdict] : tg.categories) {
            cats[std::string(to_string(c))] = to_string(verdict);
        }
        levels.push_back(
            {{"threshold", tg.threshold}, {"categories", cats}, {"overall_correct", tg.overall_correct}});
    }
    j = json{{"fitness_correct", v.fitness_correct},
             {"triage_correct", v.triage_correct ? json(*v.triage_correct) : json(nullptr)},
             {"carbo_correct", v.carbo_correct},
             {"hallucination", v.hallucination},
             {"thresholds", levels}};
}

void from_json(const json& j, Grade& v) {
    v.fitness_correct = j.at("fitness_correct").get<bool>();
    v.triage_correct = j.at("triage_correct").is_null()
                           ? std::nullopt
                           : std::optional<bool>(j.at("triage_correct").get<bool>());
    v.carbo_correct = j.at("carbo_correct").get<bool>();
    v.hallucination = j.at("hallucination").get<bool>();
    v.by_threshold.clear();
    for (const auto& level : j.at("thresholds")) {
        ThresholdGrade tg;
        tg.threshold = level.at("threshold").get<double>();
        tg.overall_correct = level.at("overall_correct").get<bool>();
        const auto& cats = level.at("categories");
        for (auto it = cats.begin(); it != cats.end(); ++it) {
            const auto s = it.value().get<std::string>();
            Verdict verdict;
            if (s == "correct") {
                verdict = Verdict::correct;
            } else if (s == "wrong") {
                verdict = Verdict::wrong;
            } else if (s == "na") {
                verdict = Verdict::na;
            } else {
                throw InvalidInput(fmt::format("unknown verdict '{}'", s));
            }
            tg.categories[parse_category(it.key())] = verdict;
        }
        v.by_threshold.push_back(std::move(tg));
    }
}

}  // namespace preop
