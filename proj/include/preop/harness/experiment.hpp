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

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "preop/clinical.hpp"
#include "preop/generation.hpp"
#include "preop/harness/config.hpp"
#include "preop/harness/records.hpp"
#include "preop/retrieval.hpp"

namespace preop::harness {

using BackendFactory = std::function<std::unique_ptr<Backend>(const BackendSpec&)>;

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);
std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec);

/// Loads one guideline directory, splits it and indexes its leaves.
Retriever build_retriever(const std::filesystem::path& corpus_dir,
                          std::span<const std::size_t> level_sizes, const Embedder& embedder,
                          const RetrieverConfig& config);

struct Study {
    std::vector<Scenario> scenarios;  // ascending id
    std::map<std::string, AnswerKey> keys;
};

/// Scenarios (restricted to `scenario_ids` when set) and every answer key in
/// the key file. Every selected scenario must have a key.
Study load_study(const RunConfig& config);

/// Retrieval, prompting, generation, extraction and grading for one key.
/// `retriever` is null for native systems.
RunRecord run_one(const GenerationKey& key, const SystemSpec& system, const Scenario& scenario,
                  const AnswerKey& answer_key, const Retriever* retriever, Backend& backend,
                  const RunConfig& config);

struct RunFailure {
    GenerationKey key;
    std::string message;
};

struct RunSummary {
    std::size_t planned = 0;
    std::size_t skipped = 0;  // already present in the record file
    std::size_t completed = 0;
    std::vector<RunFailure> failures;
    std::filesystem::path records_path;
};

inline std::filesystem::path records_path(const RunConfig& config) {
    return config.output_dir / "records.jsonl";
}

/// Runs every (system, scenario, repeat) missing from the record file,
/// `parallelism` at a time, rewriting the file after each completion. A
/// failing key is reported in the summary and does not stop the others.
RunSummary run_experiment(const RunConfig& config, const BackendFactory& factory = make_backend);

/// Re-extracts and re-grades stored records against `keys`.
std::vector<RunRecord> regrade(std::vector<RunRecord> records,
                               const std::map<std::string, AnswerKey>& keys,
                               std::span<const double> thresholds);

}  // namespace preop::harness
