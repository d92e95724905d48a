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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "preop/embedding.hpp"
#include "preop/generation.hpp"
#include "preop/remote_embedder.hpp"
#include "preop/retrieval.hpp"
#include "preop/system_id.hpp"

namespace preop::harness {

struct BackendSpec {
    enum class Kind { replay, http };
    std::string name;
    Kind kind = Kind::replay;
    std::filesystem::path fixture;  // replay
    HttpChatConfig http;            // http
};

struct SystemSpec {
    SystemId id;
    std::string backend;
    /// Unset: 4 for the reference system, 1 otherwise.
    std::optional<int> repeats;
    bool short_context = false;
};

struct EmbedderSpec {
    bool remote = false;
    EmbedderConfig mock;
    RemoteEmbedderConfig remote_config;
};

struct RunConfig {
    std::filesystem::path local_corpus;
    std::filesystem::path international_corpus;
    std::vector<std::size_t> level_sizes = kDefaultLevelSizes;
    EmbedderSpec embedder;
    RetrieverConfig retriever;
    GenerationConfig generation;

    std::filesystem::path scenarios;
    std::filesystem::path answer_keys;
    /// Restricts the run to these scenarios when nonempty.
    std::vector<std::string> scenario_ids;
    std::vector<std::filesystem::path> human_answers;
    std::optional<std::filesystem::path> score_sheets;
    std::optional<std::filesystem::path> published_fitness_table;

    std::map<std::string, BackendSpec> backends;
    std::vector<SystemSpec> systems;
    std::string reference_system = "GPT4_international";

    std::vector<double> thresholds{0.65, 0.75, 0.85};
    double primary_threshold = 0.75;
    int parallelism = 4;
    std::filesystem::path output_dir = "out";

    /// Repeat count for `system` after defaults.
    int repeats_for(const SystemSpec& system) const;

    /// Checks value ranges, cross references and, when `check_paths`, that
    /// every referenced file or directory exists.
    void validate(bool check_paths = true) const;
};

/// Parses the JSON config file described in docs/config.md. Relative paths
/// are resolved against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

}  // namespace preop::harness
