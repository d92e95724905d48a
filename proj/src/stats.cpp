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

#include "preop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "preop/error.hpp"

namespace preop::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Support of cell a given the margins, and log C(r1, x) C(r2, c1 - x) over it.
struct Hypergeometric {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<double> log_weight;

    explicit Hypergeometric(const Table2x2& t) {
        const auto r1 = t.row1(), r2 = t.row2(), c1 = t.col1();
        lo = c1 > r2 ? c1 - r2 : 0;
        hi = std::min(r1, c1);
        log_weight.reserve(hi - lo + 1);
        for (auto x = lo; x <= hi; ++x) {
            log_weight.push_back(log_choose(r1, x) + log_choose(r2, c1 - x));
        }
    }

    // E[X] under noncentrality exp(theta).
    double mean(double theta) const {
        double peak = -kInf;
        for (std::size_t i = 0; i < log_weight.size(); ++i) {
            peak = std::max(peak, log_weight[i] + theta * static_cast<double>(lo + i));
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < log_weight.size(); ++i) {
            const double x = static_cast<double>(lo + i);
            const double w = std::exp(log_weight[i] + theta * x - peak);
            num += x * w;
            den += w;
        }
        return num / den;
    }
};

}  // namespace

void Table2x2::validate() const {
    if (row1() == 0 || row2() == 0) throw InvalidInput("2x2 table has an all-zero row");
}

std::optional<double> sample_odds_ratio(const Table2x2& t) {
    const double num = static_cast<double>(t.a) * static_cast<double>(t.d);
    const double den = static_cast<double>(t.b) * static_cast<double>(t.c);
    if (den == 0.0) return num == 0.0 ? std::nullopt : std::optional<double>(kInf);
    return num / den;
}

TestResult fisher_exact(const Table2x2& t) {
    t.validate();
    const Hypergeometric h(t);
    const double observed = h.log_weight[t.a - h.lo];
    const double peak = *std::max_element(h.log_weight.begin(), h.log_weight.end());
    const double cutoff = observed + std::log1p(kProbabilityTieTolerance);

    double total = 0.0, tail = 0.0;
    for (double lw : h.log_weight) {
        const double w = std::exp(lw - peak);
        total += w;
        if (lw <= cutoff) tail += w;
    }

    TestResult r;
    r.p_two_sided = std::clamp(tail / total, 0.0, 1.0);
    r.odds_ratio_sample = sample_odds_ratio(t);
    r.odds_ratio_cmle = odds_ratio_cmle(t);
    return r;
}

std::optional<double> odds_ratio_cmle(const Table2x2& t) {
    t.validate();
    const Hypergeometric h(t);
    if (h.lo == h.hi) return std::nullopt;
    if (t.a == h.hi) return kInf;
    if (t.a == h.lo) return 0.0;

    const double target = static_cast<double>(t.a);
    double lo = -1.0, hi = 1.0;
    while (h.mean(lo) > target) {
        const double width = hi - lo;
        hi = lo;
        lo -= 2.0 * width;
    }
    while (h.mean(hi) < target) {
        const double width = hi - lo;
        lo = hi;
        hi += 2.0 * width;
    }
    while (hi - lo > kCmleTolerance) {
        const double mid = 0.5 * (lo + hi);
        const double m = h.mean(mid);
        if (m == target) return std::exp(mid);
        (m < target ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

void RatingMatrix::validate() const {
    if (rater_count() < 2) throw InvalidInput("percent agreement needs at least 2 raters");
    if (item_count() < 1) throw InvalidInput("percent agreement needs at least 1 item");
    for (const auto& row : ratings) {
        if (row.size() != item_count()) throw InvalidInput("rating matrix is not rectangular");
    }
}

double percent_agreement(const RatingMatrix& m) {
    m.validate();
    const auto raters = m.rater_count();
    const double pairs = static_cast<double>(raters * (raters - 1) / 2);
    double sum = 0.0;
    for (std::size_t item = 0; item < m.item_count(); ++item) {
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& row : m.ratings) ++counts[row[item]];
        std::size_t agreeing = 0;
        for (const auto& [label, n] : counts) agreeing += n * (n - 1) / 2;
        sum += static_cast<double>(agreeing) / pairs;
    }
    return sum / static_cast<double>(m.item_count());
}

ConfusionRates confusion_rates(std::span<const Fitness> predicted, std::span<const Fitness> truth) {
    if (predicted.size() != truth.size()) {
        throw InvalidInput(fmt::format("length mismatch: {} predictions, {} truths",
                                       predicted.size(), truth.size()));
    }
    if (predicted.empty()) throw InvalidInput("confusion rates need at least one case");
    std::size_t fit = 0, unfit = 0, false_pos = 0, false_neg = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Fitness::unfit) {
            ++unfit;
            if (predicted[i] == Fitness::fit) ++false_neg;
        } else {
            ++fit;
            if (predicted[i] == Fitness::unfit) ++false_pos;
        }
    }
    ConfusionRates r;
    if (fit) r.false_positive_rate = static_cast<double>(false_pos) / static_cast<double>(fit);
    if (unfit) r.false_negative_rate = static_cast<double>(false_neg) / static_cast<double>(unfit);
    return r;
}

void ScoreSheet::validate() const {
    for (double v : values) {
        if (!(v >= 1.0 && v <= 5.0)) {
            throw InvalidInput(fmt::format("score sheet '{}': value {} outside [1, 5]", grader, v));
        }
    }
}

double round_half_away(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double scaled = std::abs(x) * scale;
    const double rounded = std::floor(scaled + 0.5 + 1e-9);
    return std::copysign(rounded / scale, x);
}

ScoreSummary score_aggregate(std::span<const ScoreSheet> sheets) {
    if (sheets.empty()) throw InvalidInput("score aggregation needs at least one sheet");
    ScoreSummary s;
    for (const auto& sheet : sheets) {
        sheet.validate();
        for (std::size_t i = 0; i < 5; ++i) s.mean[i] += sheet.values[i];
    }
    for (std::size_t i = 0; i < 5; ++i) {
        s.mean[i] /= static_cast<double>(sheets.size());
        s.rounded[i] = round_half_away(s.mean[i], 2);
    }
    return s;
}

std::map<std::string, std::map<int, Proportion>> accuracy_by_asa(
    std::span<const FitnessOutcome> outcomes, std::span<const Scenario> scenarios) {
    std::unordered_map<std::string, int> asa;
    for (const auto& s : scenarios) asa.emplace(s.id, s.asa_class);
    std::map<std::string, std::map<int, Proportion>> out;
    for (const auto& o : outcomes) {
        auto it = asa.find(o.scenario_id);
        if (it == asa.end()) {
            throw NotFound(fmt::format("outcome for unknown scenario '{}'", o.scenario_id));
        }
        auto& p = out[o.system][it->second];
        ++p.total;
        if (o.correct) ++p.correct;
    }
    return out;
}

}  // namespace preop::stats
