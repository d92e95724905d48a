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

#include "preop/clinical.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop {

std::string_view to_string(SurgeryRisk v) {
    switch (v) {
        case SurgeryRisk::low: return "low";
        case SurgeryRisk::intermediate: return "intermediate";
        case SurgeryRisk::high: return "high";
    }
    return "low";
}

std::string_view to_string(Triage v) { return v == Triage::doctor ? "doctor" : "nurse"; }

std::string_view to_string(DelayRequirement v) {
    switch (v) {
        case DelayRequirement::yes: return "yes";
        case DelayRequirement::no: return "no";
        case DelayRequirement::either: return "either";
    }
    return "no";
}

std::string_view to_string(Reply v) {
    switch (v) {
        case Reply::yes: return "yes";
        case Reply::no: return "no";
        case Reply::absent: return "absent";
    }
    return "absent";
}

std::string_view to_string(Category v) {
    switch (v) {
        case Category::fasting: return "fasting";
        case Category::medications: return "medications";
        case Category::team_instructions: return "team_instructions";
        case Category::optimizations: return "optimizations";
    }
    return "fasting";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::correct: return "correct";
        case Verdict::wrong: return "wrong";
        case Verdict::na: return "na";
    }
    return "na";
}

SurgeryRisk parse_surgery_risk(std::string_view s) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "low") return SurgeryRisk::low;
    if (v == "intermediate") return SurgeryRisk::intermediate;
    if (v == "high") return SurgeryRisk::high;
    throw InvalidInput(fmt::format("unknown surgery risk '{}'", s));
}

Triage parse_triage(std::string_view s) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "doctor") return Triage::doctor;
    if (v == "nurse") return Triage::nurse;
    throw InvalidInput(fmt::format("unknown triage '{}'", s));
}

DelayRequirement parse_delay_requirement(std::string_view s) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "yes") return DelayRequirement::yes;
    if (v == "no") return DelayRequirement::no;
    if (v == "either") return DelayRequirement::either;
    throw InvalidInput(fmt::format("unknown delay requirement '{}'", s));
}

Reply parse_reply(std::string_view s) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "yes") return Reply::yes;
    if (v == "no") return Reply::no;
    if (v == "absent") return Reply::absent;
    throw InvalidInput(fmt::format("unknown reply '{}'", s));
}

Category parse_category(std::string_view s) {
    for (auto c : kCategories) {
        if (to_string(c) == s) return c;
    }
    throw InvalidInput(fmt::format("unknown category '{}'", s));
}

void Scenario::validate() const {
    if (id.empty()) throw InvalidInput("scenario without id");
    if (age <= 0) throw InvalidInput(fmt::format("scenario {}: age must be > 0", id));
    if (asa_class < 1 || asa_class > 5) {
        throw InvalidInput(fmt::format("scenario {}: asa_class must be 1-5", id));
    }
    if (text::trim(free_text).empty()) {
        throw InvalidInput(fmt::format("scenario {}: empty free text", id));
    }
}

void AnswerKey::validate() const {
    if (scenario_id.empty()) throw InvalidInput("answer key without scenario_id");
    for (auto c : kCategories) {
        if (!category_items.count(c)) {
            throw InvalidInput(fmt::format("answer key {}: category '{}' missing", scenario_id,
                                           to_string(c)));
        }
        for (const auto& item : category_items.at(c)) {
            if (item.label.empty() || item.patterns.empty()) {
                throw InvalidInput(fmt::format(
                    "answer key {}: every item in '{}' needs a label and at least one pattern",
                    scenario_id, to_string(c)));
            }
        }
    }
}

const ThresholdGrade& Grade::at(double threshold) const {
    for (const auto& g : by_threshold) {
        if (g.threshold == threshold) return g;
    }
    throw NotFound(fmt::format("no grade computed at threshold {}", threshold));
}

Triage triage_rule(const Scenario& s) {
    const bool nurse = s.asa_class <= 2 && s.age > 21 && s.surgery_risk != SurgeryRisk::high &&
                       !s.complication_risk_high && !s.investigations_abnormal;
    return nurse ? Triage::nurse : Triage::doctor;
}

bool triage_graded(const SystemId& system) {
    return !is_human(system) && system.knowledge_base != KnowledgeBase::international;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Position of the first `N.` / `N)` marker at or after `from`, or npos.
std::size_t find_marker(std::string_view text, int n, std::size_t from) {
    const char digit = static_cast<char>('0' + n);
    for (std::size_t i = from; i + 1 < text.size(); ++i) {
        if (text[i] != digit) continue;
        if (i > 0 && !is_space(text[i - 1]) && text[i - 1] != '>') continue;
        if (text[i + 1] != '.' && text[i + 1] != ')') continue;
        if (i + 2 < text.size() && !is_space(text[i + 2])) continue;
        return i;
    }
    return std::string_view::npos;
}

std::regex icase(const std::string& pattern) {
    try {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
        throw InvalidInput(fmt::format("bad pattern '{}': {}", pattern, e.what()));
    }
}

bool matches(std::string_view text, const std::string& pattern) {
    const auto re = icase(pattern);
    return std::regex_search(text.begin(), text.end(), re);
}

bool any_matches(std::string_view text, std::initializer_list<const char*> patterns) {
    for (const char* p : patterns) {
        if (matches(text, p)) return true;
    }
    return false;
}

// Sentences (split on . ! ? and newlines) that mention any keyword.
std::string sentences_mentioning(std::string_view text, std::initializer_list<const char*> keys) {
    std::string out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const bool end = i == text.size() || text[i] == '.' || text[i] == '!' || text[i] == '?' ||
                         text[i] == '\n';
        if (!end) continue;
        const auto sentence = text.substr(start, i - start);
        for (const char* k : keys) {
            if (text::contains_icase(sentence, k)) {
                out.append(sentence);
                out.append(". ");
                break;
            }
        }
        start = i + 1;
    }
    return out;
}

std::string section(const std::map<int, std::string_view>& parts, int n, std::string_view full,
                    std::initializer_list<const char*> keys) {
    auto it = parts.find(n);
    if (it != parts.end()) return std::string(it->second);
    return sentences_mentioning(full, keys);
}

std::optional<Triage> parse_triage_answer(std::string_view s) {
    std::smatch m;
    const std::string str(s);
    static const std::regex seen_by(R"(seen\s+by\s+(?:a|an|the)?\s*(doctor|nurse))",
                                    std::regex::ECMAScript | std::regex::icase);
    if (std::regex_search(str, m, seen_by)) return parse_triage(m[1].str());
    const bool doctor = matches(s, R"(\bdoctor\b)");
    const bool nurse = matches(s, R"(\bnurse\b)");
    if (doctor != nurse) return doctor ? Triage::doctor : Triage::nurse;
    return std::nullopt;
}

Reply parse_carbo_answer(std::string_view s) {
    if (text::trim(s).empty()) return Reply::absent;
    if (any_matches(s, {R"(\bnot\b)", R"(\bno\b)", "unsuitable", "contraindicated",
                        R"(\bavoid)", "ineligible"})) {
        return Reply::no;
    }
    if (any_matches(s, {R"(\byes\b)", "suitable", "recommended", "eligible", "proceed with"})) {
        return Reply::yes;
    }
    return Reply::absent;
}

Reply parse_delay_answer(std::string_view s) {
    if (text::trim(s).empty()) return Reply::absent;
    if (any_matches(s, {R"(\bno\s+need)", R"(\bnot\s+(?:need|necessary|required))",
                        R"(\bno\s+delay)", R"(without\s+delay)", R"(\bno\b)",
                        R"(\bcan\s+proceed)", R"(proceed\s+as\s+planned)",
                        R"(\bnot\s+be\s+delayed)"})) {
        return Reply::no;
    }
    if (any_matches(s, {R"(\bdelay)", R"(\bpostpone)", R"(\bdefer)", R"(\byes\b)"})) {
        return Reply::yes;
    }
    return Reply::absent;
}

}  // namespace

std::map<int, std::string_view> split_components(std::string_view text) {
    std::vector<std::pair<int, std::size_t>> starts;
    std::size_t pos = 0;
    for (int n = 1; n <= 8; ++n) {
        const auto at = find_marker(text, n, pos);
        if (at == std::string_view::npos) continue;
        starts.emplace_back(n, at);
        pos = at + 2;
    }
    std::map<int, std::string_view> parts;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto begin = starts[i].second + 2;
        const auto end = i + 1 < starts.size() ? starts[i + 1].second : text.size();
        parts.emplace(starts[i].first, text::trim(text.substr(begin, end - begin)));
    }
    return parts;
}

ResponseRecord extract_record(std::string_view response_text, const AnswerKey& key,
                              const SystemId& system, int repeat_index) {
    ResponseRecord r;
    r.scenario_id = key.scenario_id;
    r.system = system;
    r.repeat_index = repeat_index;

    const auto parts = split_components(response_text);
    r.triage_answer =
        parse_triage_answer(section(parts, 1, response_text, {"doctor", "nurse"}));
    r.carbo_answer = parse_carbo_answer(section(parts, 3, response_text, {"carbohydrate"}));
    r.delay_answer =
        parse_delay_answer(section(parts, 7, response_text, {"delay", "postpone", "proceed"}));

    for (auto c : kCategories) {
        auto& matched = r.matched_items[c];
        auto it = key.category_items.find(c);
        if (it == key.category_items.end()) continue;
        for (const auto& item : it->second) {
            for (const auto& p : item.patterns) {
                if (matches(response_text, p)) {
                    matched.push_back(item.label);
                    break;
                }
            }
        }
    }
    for (const auto& p : key.critical_error_patterns) {
        if (matches(response_text, p)) r.hallucination_hits.push_back(p);
    }
    return r;
}

Grade grade(const ResponseRecord& record, const AnswerKey& key, double threshold) {
    const double t[] = {threshold};
    return grade(record, key, t);
}

Grade grade(const ResponseRecord& record, const AnswerKey& key,
            std::span<const double> thresholds) {
    if (record.scenario_id != key.scenario_id) {
        throw InvalidInput(fmt::format("record for scenario '{}' graded against key '{}'",
                                       record.scenario_id, key.scenario_id));
    }
    for (double t : thresholds) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw InvalidInput(fmt::format("threshold must be in (0, 1], got {}", t));
        }
    }

    Grade g;
    g.hallucination = !record.hallucination_hits.empty();
    const bool ok = !g.hallucination;

    switch (key.delay_required) {
        case DelayRequirement::yes: g.fitness_correct = record.delay_answer == Reply::yes; break;
        case DelayRequirement::no: g.fitness_correct = record.delay_answer == Reply::no; break;
        case DelayRequirement::either: g.fitness_correct = record.delay_answer != Reply::absent; break;
    }
    g.fitness_correct = g.fitness_correct && ok;
    g.carbo_correct =
        ok && record.carbo_answer == (key.carbo_loading ? Reply::yes : Reply::no);
    if (triage_graded(record.system)) {
        g.triage_correct = ok && record.triage_answer == key.triage_expected;
    }

    for (double t : thresholds) {
        ThresholdGrade tg;
        tg.threshold = t;
        std::size_t graded = 1;  // carbohydrate loading is always graded
        std::size_t correct = g.carbo_correct ? 1 : 0;
        for (auto c : kCategories) {
            auto it = key.category_items.find(c);
            const std::size_t total = it == key.category_items.end() ? 0 : it->second.size();
            if (total == 0) {
                tg.categories[c] = Verdict::na;
                continue;
            }
            std::size_t matched = 0;
            if (auto m = record.matched_items.find(c); m != record.matched_items.end()) {
                for (const auto& item : it->second) {
                    if (std::find(m->second.begin(), m->second.end(), item.label) !=
                        m->second.end()) {
                        ++matched;
                    }
                }
            }
            const double fraction = static_cast<double>(matched) / static_cast<double>(total);
            const bool pass = ok && fraction >= t;
            tg.categories[c] = pass ? Verdict::correct : Verdict::wrong;
            ++graded;
            correct += pass ? 1 : 0;
        }
        tg.overall_correct =
            ok && static_cast<double>(correct) / static_cast<double>(graded) >= t;
        g.by_threshold.push_back(std::move(tg));
    }
    return g;
}

}  // namespace preop
