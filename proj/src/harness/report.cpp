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

#include "preop/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop::harness {

namespace fs = std::filesystem;
using stats::Proportion;
using stats::Table2x2;

namespace {

constexpr std::array<Category, 3> kComparedCategories{
    Category::medications, Category::team_instructions, Category::optimizations};

std::string category_title(Category c) {
    switch (c) {
        case Category::fasting: return "Fasting instructions";
        case Category::medications: return "Medication instructions";
        case Category::team_instructions: return "Instructions to healthcare workers";
        case Category::optimizations: return "Types of optimizations required";
    }
    return std::string(to_string(c));
}

std::string format_fraction(const Proportion& p) {
    return p.total == 0 ? "NA" : format_percent(p.value());
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, '\t')) out.emplace_back(text::trim(cell));
    return out;
}

/// Reference first, then the human pseudo-system, then the rest by name.
std::vector<std::string> agent_order(std::span<const Outcome> outcomes, const std::string& reference) {
    std::set<std::string> names;
    for (const auto& o : outcomes) names.insert(o.system_name());
    std::vector<std::string> out;
    if (names.erase(reference)) out.push_back(reference);
    if (names.erase(std::string(kHumanSystem))) out.emplace_back(kHumanSystem);
    out.insert(out.end(), names.begin(), names.end());
    return out;
}

struct Comparison {
    std::optional<double> sample;
    std::optional<double> cmle;
    std::optional<double> p;
};

Comparison compare(const Proportion& reference, const Proportion& other) {
    if (reference.total == 0 || other.total == 0) return {};
    const auto r = stats::fisher_exact(comparison_table(reference, other));
    return {r.odds_ratio_sample, r.odds_ratio_cmle, r.p_two_sided};
}

std::vector<const Outcome*> outcomes_of(std::span<const Outcome> outcomes, std::string_view system) {
    std::vector<const Outcome*> out;
    for (const auto& o : outcomes) {
        if (o.system_name() == system) out.push_back(&o);
    }
    return out;
}

double mean_or_zero(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

const Table* Report::find(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::vector<PublishedFitnessRow> load_published_fitness(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    std::vector<PublishedFitnessRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = split_tabs(line);
        if (cells.size() != 5) {
            throw InvalidInput(fmt::format("{}:{}: expected 5 columns, got {}", path.string(), line_no,
                                           cells.size()));
        }
        PublishedFitnessRow r;
        try {
            r.agent = cells[0];
            r.accuracy_pct = std::stod(cells[1]);
            r.n = static_cast<std::size_t>(std::stoul(cells[2]));
            if (cells[3] != "-") r.odds_ratio = std::stod(cells[3]);
        } catch (const std::logic_error&) {
            throw InvalidInput(fmt::format("{}:{}: malformed number", path.string(), line_no));
        }
        r.p_value = cells[4];
        if (r.n == 0 || r.accuracy_pct < 0.0 || r.accuracy_pct > 100.0) {
            throw InvalidInput(fmt::format("{}:{}: accuracy or n out of range", path.string(), line_no));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<stats::ScoreSheet> load_score_sheets(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    std::vector<stats::ScoreSheet> sheets;
    try {
        const auto doc = nlohmann::json::parse(in);
        for (const auto& g : doc.at("graders")) {
            stats::ScoreSheet s;
            s.grader = g.at("grader").get<std::string>();
            const auto values = g.at("values").get<std::vector<double>>();
            if (values.size() != s.values.size()) {
                throw InvalidInput(fmt::format("grader '{}' needs {} values", s.grader, s.values.size()));
            }
            std::copy(values.begin(), values.end(), s.values.begin());
            s.validate();
            sheets.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
    return sheets;
}

std::vector<Outcome> collect_outcomes(const ReportInputs& in) {
    std::vector<Outcome> out;
    out.reserve(in.records.size() + in.human_answers.size());
    for (const auto& r : in.records) {
        out.push_back({r.response, r.grade, r.generation.retrieval_latency_ms,
                       r.generation.generation_latency_ms});
    }
    for (const auto& h : in.human_answers) {
        auto it = in.keys.find(h.scenario_id);
        if (it == in.keys.end()) {
            throw NotFound(fmt::format("no answer key for human answer on scenario '{}'", h.scenario_id));
        }
        out.push_back({h, grade(h, it->second, in.thresholds), std::nullopt, std::nullopt});
    }
    return out;
}

Table2x2 comparison_table(const Proportion& reference, const Proportion& other) {
    return {reference.correct, reference.total - reference.correct, other.correct,
            other.total - other.correct};
}

Proportion fitness_accuracy(std::span<const Outcome> outcomes, std::string_view system) {
    Proportion p;
    for (const auto* o : outcomes_of(outcomes, system)) {
        ++p.total;
        if (o->grade.fitness_correct) ++p.correct;
    }
    return p;
}

CategoryAccuracy category_accuracy(std::span<const Outcome> outcomes, std::string_view system,
                                   double threshold) {
    CategoryAccuracy acc;
    for (auto c : kCategories) acc.categories[c] = {};
    for (const auto* o : outcomes_of(outcomes, system)) {
        const auto& tg = o->grade.at(threshold);
        for (const auto& [c, v] : tg.categories) {
            if (v == Verdict::na) continue;
            auto& p = acc.categories[c];
            ++p.total;
            if (v == Verdict::correct) ++p.correct;
        }
        ++acc.carbo.total;
        if (o->grade.carbo_correct) ++acc.carbo.correct;
        ++acc.hallucinations.total;
        if (o->grade.hallucination) ++acc.hallucinations.correct;
    }
    acc.total = acc.carbo;
    for (const auto& [c, p] : acc.categories) {
        acc.total.correct += p.correct;
        acc.total.total += p.total;
    }
    return acc;
}

std::string format_percent(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

std::string format_odds_ratio(const std::optional<double>& v) {
    if (!v) return "NA";
    if (std::isinf(*v)) return "inf";
    return fmt::format("{:.2f}", *v);
}

std::string format_p(double p) { return p < 0.001 ? "<0.001" : fmt::format("{:.3f}", p); }

Report build_report(const ReportInputs& in) {
    if (in.records.empty()) throw InvalidInput("no records to report on");
    if (std::find(in.thresholds.begin(), in.thresholds.end(), in.primary_threshold) ==
        in.thresholds.end()) {
        throw InvalidInput("primary threshold must be one of the thresholds");
    }

    Report report;
    const auto outcomes = collect_outcomes(in);
    for (const auto& o : outcomes) {
        if (!in.keys.count(o.response.scenario_id)) {
            throw NotFound(fmt::format("no answer key for scenario '{}' answered by {}",
                                       o.response.scenario_id, o.system_name()));
        }
    }
    const auto agents = agent_order(outcomes, in.reference_system);
    const std::string& ref = in.reference_system;
    const bool have_reference = std::find(agents.begin(), agents.end(), ref) != agents.end();
    const std::string human(kHumanSystem);
    const bool have_human = std::find(agents.begin(), agents.end(), human) != agents.end();
    if (!have_reference) {
        report.warnings.push_back(
            fmt::format("no records for reference system '{}'; comparisons are NA", ref));
    }
    if (!have_human) report.warnings.push_back("no human answers; human rows omitted");

    auto or_cells = [&](const std::string& agent, const Proportion& r, const Proportion& o,
                        bool both) -> std::vector<std::string> {
        const std::size_t n = both ? 3 : 2;
        if (agent == ref) return std::vector<std::string>(n, "-");
        const auto c = compare(r, o);
        std::vector<std::string> cells{format_odds_ratio(c.sample)};
        if (both) cells.push_back(format_odds_ratio(c.cmle));
        cells.push_back(c.p ? format_p(*c.p) : "NA");
        return cells;
    };

    {
        Table t{"fitness_accuracy", "Accuracy of medical fitness, compared against " + ref,
                {"Agent", "Answers", "Accuracy", "OR (sample)", "OR (CMLE)", "p-value"}, {}};
        const auto r = fitness_accuracy(outcomes, ref);
        for (const auto& a : agents) {
            const auto p = fitness_accuracy(outcomes, a);
            std::vector<std::string> row{a, std::to_string(p.total), format_fraction(p)};
            for (auto& c : or_cells(a, r, p, true)) row.push_back(std::move(c));
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"triage_accuracy", "Accuracy of nurse or doctor triage",
                {"Agent", "Wrong", "Correct", "% Correct"}, {}};
        for (const auto& a : agents) {
            Proportion p;
            for (const auto* o : outcomes_of(outcomes, a)) {
                if (!o->grade.triage_correct) continue;
                ++p.total;
                if (*o->grade.triage_correct) ++p.correct;
            }
            if (p.total == 0) continue;
            t.rows.push_back({a, std::to_string(p.total - p.correct), std::to_string(p.correct),
                              format_fraction(p)});
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"category_accuracy",
                fmt::format("Accuracy of preoperative instructions and hallucination rate ({:.0f}% alignment)",
                            100.0 * in.primary_threshold),
                {"Agent", category_title(Category::fasting), "Carbohydrate loading",
                 category_title(Category::medications), category_title(Category::team_instructions),
                 category_title(Category::optimizations), "Total correct", "Hallucinations"},
                {}};
        for (const auto& a : agents) {
            const auto acc = category_accuracy(outcomes, a, in.primary_threshold);
            t.rows.push_back({a, format_fraction(acc.categories.at(Category::fasting)),
                              format_fraction(acc.carbo),
                              format_fraction(acc.categories.at(Category::medications)),
                              format_fraction(acc.categories.at(Category::team_instructions)),
                              format_fraction(acc.categories.at(Category::optimizations)),
                              format_fraction(acc.total),
                              a == human ? "NA" : format_fraction(acc.hallucinations)});
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"category_comparison",
                "Odds ratio and p-value of instruction accuracy compared against " + ref,
                {"Agent", "Carbohydrate loading OR", "p-value"}, {}};
        for (auto c : kComparedCategories) {
            t.headers.push_back(category_title(c) + " OR");
            t.headers.push_back("p-value");
        }
        t.headers.push_back("Total OR");
        t.headers.push_back("p-value");
        const auto r = category_accuracy(outcomes, ref, in.primary_threshold);
        for (const auto& a : agents) {
            const auto acc = category_accuracy(outcomes, a, in.primary_threshold);
            std::vector<std::string> row{a};
            auto add = [&](const Proportion& rp, const Proportion& ap) {
                for (auto& c : or_cells(a, rp, ap, false)) row.push_back(std::move(c));
            };
            add(r.carbo, acc.carbo);
            for (auto c : kComparedCategories) add(r.categories.at(c), acc.categories.at(c));
            add(r.total, acc.total);
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"threshold_sensitivity", "Total accuracy at other alignment thresholds", {"Agent"}, {}};
        std::vector<double> others;
        for (double th : in.thresholds) {
            if (th != in.primary_threshold) others.push_back(th);
        }
        for (double th : others) {
            const auto pct = fmt::format("{:.0f}%", 100.0 * th);
            t.headers.push_back("Total " + pct);
            t.headers.push_back("OR " + pct);
            t.headers.push_back("p-value " + pct);
        }
        for (const auto& a : agents) {
            std::vector<std::string> row{a};
            for (double th : others) {
                const auto acc = category_accuracy(outcomes, a, th);
                const auto r = category_accuracy(outcomes, ref, th);
                row.push_back(format_fraction(acc.total));
                for (auto& c : or_cells(a, r.total, acc.total, false)) row.push_back(std::move(c));
            }
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    if (!in.score_sheets.empty()) {
        Table t{"score_summary", "S.C.O.R.E. evaluation of " + ref, {"Grader"}, {}};
        for (const char* d : stats::kScoreDimensions) t.headers.emplace_back(d);
        for (const auto& s : in.score_sheets) {
            std::vector<std::string> row{s.grader};
            for (double v : s.values) row.push_back(fmt::format("{:.2f}", v));
            t.rows.push_back(std::move(row));
        }
        const auto summary = stats::score_aggregate(in.score_sheets);
        std::vector<std::string> avg{"Average"};
        for (double v : summary.rounded) avg.push_back(fmt::format("{:.2f}", v));
        t.rows.push_back(std::move(avg));
        report.tables.push_back(std::move(t));
    } else {
        report.warnings.push_back("no score sheets; S.C.O.R.E. table omitted");
    }

    {
        Table t{"confusion_rates", "False positive and false negative rates of fitness prediction",
                {"Agent", "False positive (%)", "False negative (%)"}, {}};
        for (const auto& a : agents) {
            std::vector<stats::Fitness> predicted, truth;
            for (const auto* o : outcomes_of(outcomes, a)) {
                const auto& key = in.keys.at(o->response.scenario_id);
                if (key.delay_required == DelayRequirement::either) continue;
                truth.push_back(key.delay_required == DelayRequirement::yes ? stats::Fitness::unfit
                                                                            : stats::Fitness::fit);
                predicted.push_back(o->response.delay_answer == Reply::yes ? stats::Fitness::unfit
                                                                           : stats::Fitness::fit);
            }
            if (truth.empty()) {
                t.rows.push_back({a, "NA", "NA"});
                continue;
            }
            const auto rates = stats::confusion_rates(predicted, truth);
            auto cell = [](const std::optional<double>& v) {
                return v ? fmt::format("{:.1f}", 100.0 * *v) : std::string("NA");
            };
            t.rows.push_back({a, cell(rates.false_positive_rate), cell(rates.false_negative_rate)});
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"agreement", "Percentage agreement between repeated answers", {"Percentage agreement"}, {}};
        std::vector<std::string> raters_of;
        for (const auto& a : {human, ref}) {
            if (std::find(agents.begin(), agents.end(), a) != agents.end()) raters_of.push_back(a);
        }
        for (const auto& a : raters_of) t.headers.push_back(a);

        using Label = std::function<std::string(const Outcome&)>;
        const double th = in.primary_threshold;
        auto verdict_of = [th](Category c) -> Label {
            return [c, th](const Outcome& o) {
                return std::string(to_string(o.grade.at(th).categories.at(c)));
            };
        };
        const std::vector<std::pair<std::string, Label>> rows{
            {"Delay operation", [](const Outcome& o) { return std::string(to_string(o.response.delay_answer)); }},
            {"Seen by doctor/nurse",
             [](const Outcome& o) {
                 return o.response.triage_answer ? std::string(to_string(*o.response.triage_answer))
                                                 : std::string("absent");
             }},
            {category_title(Category::fasting), verdict_of(Category::fasting)},
            {"Carbohydrate loading", [](const Outcome& o) { return std::string(to_string(o.response.carbo_answer)); }},
            {category_title(Category::medications), verdict_of(Category::medications)},
            {category_title(Category::team_instructions), verdict_of(Category::team_instructions)},
            {category_title(Category::optimizations), verdict_of(Category::optimizations)},
        };

        // Raters are repeat indices; items are the scenarios every rater answered.
        std::map<std::string, std::pair<std::vector<int>, std::vector<std::string>>> layout;
        for (const auto& a : raters_of) {
            std::map<std::string, std::set<int>> by_scenario;
            std::set<int> raters;
            for (const auto* o : outcomes_of(outcomes, a)) {
                by_scenario[o->response.scenario_id].insert(o->response.repeat_index);
                raters.insert(o->response.repeat_index);
            }
            std::vector<std::string> items;
            for (const auto& [sid, reps] : by_scenario) {
                if (reps == raters) items.push_back(sid);
            }
            layout[a] = {std::vector<int>(raters.begin(), raters.end()), items};
            if (raters.size() < 2 || items.empty()) {
                report.warnings.push_back(
                    fmt::format("'{}' has fewer than two complete raters; agreement is '-'", a));
            }
        }

        for (const auto& [label, fn] : rows) {
            std::vector<std::string> row{label};
            for (const auto& a : raters_of) {
                const auto& [raters, items] = layout.at(a);
                if (raters.size() < 2 || items.empty() || (a == human && label == "Seen by doctor/nurse")) {
                    row.emplace_back("-");
                    continue;
                }
                std::map<std::pair<int, std::string>, const Outcome*> cell;
                for (const auto* o : outcomes_of(outcomes, a)) {
                    cell[{o->response.repeat_index, o->response.scenario_id}] = o;
                }
                stats::RatingMatrix m;
                for (int r : raters) {
                    std::vector<std::string> labels;
                    for (const auto& sid : items) labels.push_back(fn(*cell.at({r, sid})));
                    m.ratings.push_back(std::move(labels));
                }
                row.push_back(fmt::format("{:.2f}", stats::percent_agreement(m)));
            }
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    {
        std::set<int> classes;
        for (const auto& s : in.scenarios) classes.insert(s.asa_class);
        Table t{"asa_accuracy", "Fitness accuracy stratified by ASA class", {"Agent"}, {}};
        for (int c : classes) t.headers.push_back(fmt::format("ASA {}", c));
        std::vector<stats::FitnessOutcome> fo;
        for (const auto& o : outcomes) {
            fo.push_back({o.system_name(), o.response.scenario_id, o.grade.fitness_correct});
        }
        const auto by_asa = stats::accuracy_by_asa(fo, in.scenarios);
        for (const auto& a : agents) {
            std::vector<std::string> row{a};
            const auto it = by_asa.find(a);
            for (int c : classes) {
                if (it == by_asa.end() || !it->second.count(c)) {
                    row.emplace_back("NA");
                } else {
                    row.push_back(format_fraction(it->second.at(c)));
                }
            }
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    {
        Table t{"latency", "Mean recorded latency per answer",
                {"Agent", "Answers", "Retrieval (ms)", "Generation (ms)"}, {}};
        for (const auto& a : agents) {
            std::vector<double> ret, gen;
            for (const auto* o : outcomes_of(outcomes, a)) {
                if (o->retrieval_ms) ret.push_back(*o->retrieval_ms);
                if (o->generation_ms) gen.push_back(*o->generation_ms);
            }
            if (gen.empty()) continue;
            t.rows.push_back({a, std::to_string(gen.size()), fmt::format("{:.3f}", mean_or_zero(ret)),
                              fmt::format("{:.3f}", mean_or_zero(gen))});
        }
        report.tables.push_back(std::move(t));
    }

    if (!in.published_fitness.empty()) {
        Table t{"fitness_reproduction",
                "Published fitness accuracy recomputed from reconstructed counts",
                {"Agent", "Published accuracy", "Reconstructed", "Published OR", "OR (sample)",
                 "OR (CMLE)", "Published p", "p-value"},
                {}};
        auto counts = [](const PublishedFitnessRow& r) {
            const auto correct = static_cast<std::size_t>(
                std::llround(r.accuracy_pct / 100.0 * static_cast<double>(r.n)));
            return Proportion{correct, r.n};
        };
        const auto ref_row = std::find_if(in.published_fitness.begin(), in.published_fitness.end(),
                                          [&](const PublishedFitnessRow& r) { return r.agent == ref; });
        if (ref_row == in.published_fitness.end()) {
            report.warnings.push_back("published fitness table has no reference row");
        }
        for (const auto& r : in.published_fitness) {
            const auto p = counts(r);
            std::vector<std::string> row{r.agent, fmt::format("{:.1f}%", r.accuracy_pct),
                                         fmt::format("{}/{}", p.correct, p.total),
                                         r.odds_ratio ? fmt::format("{:.2f}", *r.odds_ratio) : "-"};
            if (ref_row == in.published_fitness.end()) {
                row.insert(row.end(), {"NA", "NA", r.p_value, "NA"});
            } else if (r.agent == ref) {
                row.insert(row.end(), {"-", "-", r.p_value, "-"});
            } else {
                const auto c = compare(counts(*ref_row), p);
                row.insert(row.end(), {format_odds_ratio(c.sample), format_odds_ratio(c.cmle), r.p_value,
                                       c.p ? format_p(*c.p) : "NA"});
            }
            t.rows.push_back(std::move(row));
        }
        report.tables.push_back(std::move(t));
    }

    return report;
}

std::string render_text(const Table& t) {
    std::vector<std::size_t> width(t.headers.size(), 0);
    auto widen = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
            width[i] = std::max(width[i], cells[i].size());
        }
    };
    widen(t.headers);
    for (const auto& r : t.rows) widen(r);

    std::string out = t.title + "\n\n";
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < width.size(); ++i) {
            const auto& c = i < cells.size() ? cells[i] : std::string();
            if (i == 0) {
                s += fmt::format("{:<{}}", c, width[i]);
            } else {
                s += fmt::format("  {:>{}}", c, width[i]);
            }
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out += s + '\n';
    };
    line(t.headers);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + '\n';
    for (const auto& r : t.rows) line(r);
    return out;
}

std::string render_tsv(const Table& t) {
    auto join = [](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += '\t';
            s += cells[i];
        }
        return s + '\n';
    };
    std::string out = join(t.headers);
    for (const auto& r : t.rows) out += join(r);
    return out;
}

void write_report(const Report& report, const fs::path& dir) {
    fs::create_directories(dir);
    auto write = [](const fs::path& p, const std::string& body) {
        std::ofstream out(p, std::ios::trunc | std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
        out << body;
    };
    std::string all;
    for (const auto& t : report.tables) {
        const auto txt = render_text(t);
        write(dir / (t.name + ".txt"), txt);
        write(dir / (t.name + ".tsv"), render_tsv(t));
        all += txt + '\n';
    }
    for (const auto& w : report.warnings) all += "warning: " + w + '\n';
    write(dir / "report.txt", all);
}

}  // namespace preop::harness
