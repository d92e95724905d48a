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

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "preop/system_id.hpp"

namespace preop {

enum class SurgeryRisk { low, intermediate, high };
enum class Triage { doctor, nurse };
/// `either` marks a dual-correct key: both yes and no are accepted.
enum class DelayRequirement { yes, no, either };
/// A yes/no answer as parsed from free text.
enum class Reply { yes, no, absent };

/// Instruction categories graded against item lists.
enum class Category { fasting, medications, team_instructions, optimizations };
inline constexpr std::array<Category, 4> kCategories{
    Category::fasting, Category::medications, Category::team_instructions,
    Category::optimizations};

/// Alignment thresholds: the primary 75% rule and its 65%/85% sensitivity runs.
inline constexpr std::array<double, 3> kThresholds{0.65, 0.75, 0.85};
inline constexpr double kPrimaryThreshold = 0.75;

std::string_view to_string(SurgeryRisk v);
std::string_view to_string(Triage v);
std::string_view to_string(DelayRequirement v);
std::string_view to_string(Reply v);
std::string_view to_string(Category v);
SurgeryRisk parse_surgery_risk(std::string_view s);
Triage parse_triage(std::string_view s);
DelayRequirement parse_delay_requirement(std::string_view s);
Reply parse_reply(std::string_view s);
Category parse_category(std::string_view s);

struct Scenario {
    std::string id;
    int age = 0;
    int asa_class = 1;
    SurgeryRisk surgery_risk = SurgeryRisk::low;
    bool investigations_abnormal = false;
    bool complication_risk_high = false;
    std::string free_text;

    void validate() const;
};

struct KeyItem {
    std::string label;
    /// Case-insensitive ECMAScript regexes; any match counts as the item.
    std::vector<std::string> patterns;
};

struct AnswerKey {
    std::string scenario_id;
    DelayRequirement delay_required = DelayRequirement::no;
    Triage triage_expected = Triage::doctor;
    bool carbo_loading = false;
    /// Every category is present; an empty list grades as NA.
    std::map<Category, std::vector<KeyItem>> category_items;
    std::vector<std::string> critical_error_patterns;

    void validate() const;
};

struct ResponseRecord {
    std::string scenario_id;
    SystemId system;
    int repeat_index = 1;
    Reply delay_answer = Reply::absent;
    std::optional<Triage> triage_answer;
    Reply carbo_answer = Reply::absent;
    /// Labels of matched key items, per category.
    std::map<Category, std::vector<std::string>> matched_items;
    std::vector<std::string> hallucination_hits;
};

enum class Verdict { correct, wrong, na };
std::string_view to_string(Verdict v);

struct ThresholdGrade {
    double threshold = kPrimaryThreshold;
    std::map<Category, Verdict> categories;
    bool overall_correct = false;
};

struct Grade {
    bool fitness_correct = false;
    /// Only graded for native and local-guideline systems.
    std::optional<bool> triage_correct;
    bool carbo_correct = false;
    bool hallucination = false;
    std::vector<ThresholdGrade> by_threshold;

    /// Grade at `threshold`; throws NotFound if it was not computed.
    const ThresholdGrade& at(double threshold) const;
};

/// Nurse iff ASA <= 2, age > 21, surgery not high risk, complication risk not
/// high and investigations normal; doctor otherwise.
Triage triage_rule(const Scenario& scenario);

/// Whether the nurse/doctor aspect is graded for `system`.
bool triage_graded(const SystemId& system);

/// Splits a numbered response into its components 1..8. Markers are `N.` or
/// `N)` at the start of the text or after whitespace, found in ascending
/// order; a component runs until the next marker found. Missing numbers are
/// simply absent from the result.
std::map<int, std::string_view> split_components(std::string_view text);

/// Deterministic stand-in for a human grader; see docs/grading.md for the
/// phrase rules.
ResponseRecord extract_record(std::string_view response_text, const AnswerKey& key,
                              const SystemId& system, int repeat_index);

Grade grade(const ResponseRecord& record, const AnswerKey& key, double threshold);
Grade grade(const ResponseRecord& record, const AnswerKey& key,
            std::span<const double> thresholds = kThresholds);

/// Scenario file: `key: value` header (id, age, asa_class, surgery_risk,
/// investigations_abnormal, complication_risk_high), blank line, note body.
Scenario parse_scenario(std::string_view contents, std::string_view origin);
std::vector<Scenario> load_scenarios(const std::filesystem::path& directory);

/// JSON object `{"keys": [...]}` of answer keys, see docs/formats.md.
std::vector<AnswerKey> load_answer_keys(const std::filesystem::path& path);

}  // namespace preop
