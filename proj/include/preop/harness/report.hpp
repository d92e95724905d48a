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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "preop/clinical.hpp"
#include "preop/harness/records.hpp"
#include "preop/stats.hpp"

namespace preop::harness {

/// A graded answer from either a generation record or a human answer file.
struct Outcome {
    ResponseRecord response;
    Grade grade;
    std::optional<double> retrieval_ms;
    std::optional<double> generation_ms;

    std::string system_name() const { return response.system.name(); }
};

struct PublishedFitnessRow {
    std::string agent;
    double accuracy_pct = 0.0;
    std::size_t n = 14;                // answers behind the percentage
    std::optional<double> odds_ratio;  // unset for the reference row
    std::string p_value;               // as printed, e.g. "0.016" or "<0.001"
};

/// TSV with header `agent	accuracy_pct	n	odds_ratio	p_value`; "-" marks an
/// empty cell.
std::vector<PublishedFitnessRow> load_published_fitness(const std::filesystem::path& path);

/// JSON `{"graders": [{"grader": "...", "values": [five numbers]}]}`.
std::vector<stats::ScoreSheet> load_score_sheets(const std::filesystem::path& path);

struct ReportInputs {
    std::vector<RunRecord> records;
    std::vector<ResponseRecord> human_answers;
    std::vector<Scenario> scenarios;
    std::map<std::string, AnswerKey> keys;
    std::string reference_system = "GPT4_international";
    std::vector<double> thresholds{0.65, 0.75, 0.85};
    double primary_threshold = 0.75;
    std::vector<stats::ScoreSheet> score_sheets;
    std::vector<PublishedFitnessRow> published_fitness;
};

struct Table {
    std::string name;  // file stem
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::vector<Table> tables;
    std::vector<std::string> warnings;

    const Table* find(std::string_view name) const;
};

/// Grades human answers and merges them with the records.
std::vector<Outcome> collect_outcomes(const ReportInputs& in);

/// Reference in the first row, the comparator in the second.
stats::Table2x2 comparison_table(const stats::Proportion& reference, const stats::Proportion& other);

stats::Proportion fitness_accuracy(std::span<const Outcome> outcomes, std::string_view system);

/// Per-category, carbohydrate-loading and pooled totals at one threshold.
struct CategoryAccuracy {
    std::map<Category, stats::Proportion> categories;
    stats::Proportion carbo;
    stats::Proportion total;
    stats::Proportion hallucinations;  // hallucinated / answers
};

CategoryAccuracy category_accuracy(std::span<const Outcome> outcomes, std::string_view system,
                                   double threshold);

Report build_report(const ReportInputs& in);

std::string format_percent(double fraction);
std::string format_odds_ratio(const std::optional<double>& v);
std::string format_p(double p);

std::string render_text(const Table& t);
std::string render_tsv(const Table& t);

/// Writes `<name>.txt` and `<name>.tsv` per table plus `report.txt` holding
/// all tables.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace preop::harness
