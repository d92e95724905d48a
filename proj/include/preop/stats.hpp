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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "preop/clinical.hpp"

namespace preop::stats {

/// 2x2 contingency table. Row 1 is the reference agent (correct, wrong),
/// row 2 the comparator (correct, wrong).
struct Table2x2 {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;

    std::uint64_t row1() const { return a + b; }
    std::uint64_t row2() const { return c + d; }
    std::uint64_t col1() const { return a + c; }
    std::uint64_t total() const { return a + b + c + d; }

    /// Throws InvalidInput on an all-zero row.
    void validate() const;
};

struct TestResult {
    /// a*d / (b*c); +inf when only b*c is zero, nullopt (NA) when both are.
    std::optional<double> odds_ratio_sample;
    /// Conditional MLE; 0 or +inf at the support edges, nullopt if degenerate.
    std::optional<double> odds_ratio_cmle;
    double p_two_sided = 1.0;
};

/// Relative tolerance used when comparing table probabilities against the
/// observed one.
inline constexpr double kProbabilityTieTolerance = 1e-12;

/// Two-sided Fisher exact test: sums the hypergeometric probabilities (all
/// margins fixed) of every table no more probable than the observed one.
/// Probabilities are handled in log space.
TestResult fisher_exact(const Table2x2& t);

std::optional<double> sample_odds_ratio(const Table2x2& t);

/// The psi > 0 maximising the Fisher noncentral hypergeometric likelihood of
/// `a` given the margins. Solved by bisection on log(psi) for E_psi[a] = a:
/// the bracket starts at [-1, 1] and doubles outward until it straddles the
/// root, then halves until narrower than kCmleTolerance.
std::optional<double> odds_ratio_cmle(const Table2x2& t);

inline constexpr double kCmleTolerance = 1e-8;

/// Labels given by each rater (outer index) to each item (inner index).
struct RatingMatrix {
    std::vector<std::vector<std::string>> ratings;

    std::size_t rater_count() const { return ratings.size(); }
    std::size_t item_count() const { return ratings.empty() ? 0 : ratings.front().size(); }
    void validate() const;
};

/// Mean over items of the share of rater pairs that gave identical labels.
double percent_agreement(const RatingMatrix& m);

/// `unfit` means the patient needs optimisation or a delay.
enum class Fitness { fit, unfit };

struct ConfusionRates {
    std::optional<double> false_positive_rate;  // flagged unfit / truly fit
    std::optional<double> false_negative_rate;  // missed unfit / truly unfit
};

ConfusionRates confusion_rates(std::span<const Fitness> predicted, std::span<const Fitness> truth);

/// Safety, Consensus, Objectivity, Reproducibility, Explainability.
inline constexpr std::array<const char*, 5> kScoreDimensions{
    "Safety", "Consensus", "Objectivity", "Reproducibility", "Explainability"};

struct ScoreSheet {
    std::string grader;
    std::array<double, 5> values{};

    void validate() const;
};

struct ScoreSummary {
    std::array<double, 5> mean{};
    std::array<double, 5> rounded{};  // two decimals, half away from zero
};

ScoreSummary score_aggregate(std::span<const ScoreSheet> sheets);

/// Rounds half away from zero at `decimals` places. Values within 1e-9 (in
/// units of the last kept place) of a half are treated as exact halves so
/// that decimal inputs like 4.395 round up despite their binary error.
double round_half_away(double x, int decimals);

struct Proportion {
    std::size_t correct = 0;
    std::size_t total = 0;

    double value() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
    friend bool operator==(const Proportion&, const Proportion&) = default;
};

struct FitnessOutcome {
    std::string system;
    std::string scenario_id;
    bool correct = false;
};

/// system -> ASA class -> fitness accuracy. Classes with no scenarios are
/// absent. Throws NotFound for an outcome whose scenario is unknown.
std::map<std::string, std::map<int, Proportion>> accuracy_by_asa(
    std::span<const FitnessOutcome> outcomes, std::span<const Scenario> scenarios);

}  // namespace preop::stats
