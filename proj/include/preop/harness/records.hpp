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
#include <string>
#include <vector>

#include <json.hpp>

#include "preop/clinical.hpp"
#include "preop/generation.hpp"

namespace preop::harness {

inline constexpr int kRecordSchemaVersion = 1;

/// One generation with everything needed to re-grade and report on it.
struct RunRecord {
    GenerationResult generation;
    bool short_context = false;
    std::vector<std::string> context_ids;  // merged node ids placed in the prompt
    ResponseRecord response;
    Grade grade;

    GenerationKey key() const;
};

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

/// Reads a JSONL record file. A missing file yields no records; a record with
/// a different schema_version or a duplicate key is an error.
std::vector<RunRecord> load_records(const std::filesystem::path& path);

/// Writes records sorted by key, replacing `path` atomically.
void save_records(const std::filesystem::path& path, std::vector<RunRecord> records);

/// Human answers: JSONL of already-extracted ResponseRecords.
std::vector<ResponseRecord> load_human_answers(const std::filesystem::path& path);

}  // namespace preop::harness
