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

#include "preop/harness/records.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/serialization.hpp"

namespace preop::harness {

namespace fs = std::filesystem;
using nlohmann::json;

GenerationKey RunRecord::key() const {
    return {generation.system, generation.scenario_id, generation.repeat_index};
}

void to_json(json& j, const RunRecord& r) {
    const auto& g = r.generation;
    j = json{{"schema_version", kRecordSchemaVersion},
             {"system", g.system.name()},
             {"scenario_id", g.scenario_id},
             {"repeat_index", g.repeat_index},
             {"short_context", r.short_context},
             {"text", g.text},
             {"truncated", g.truncated},
             {"retrieval_latency_ms", g.retrieval_latency_ms},
             {"generation_latency_ms", g.generation_latency_ms},
             {"contexts", r.context_ids},
             {"response", r.response},
             {"grade", r.grade}};
}

void from_json(const json& j, RunRecord& r) {
    const auto version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion) {
        throw InvalidInput(fmt::format("unsupported record schema_version {}", version));
    }
    auto& g = r.generation;
    g.system = SystemId::parse(j.at("system").get<std::string>());
    g.scenario_id = j.at("scenario_id").get<std::string>();
    g.repeat_index = j.at("repeat_index").get<int>();
    g.text = j.at("text").get<std::string>();
    g.truncated = j.value("truncated", false);
    g.retrieval_latency_ms = j.value("retrieval_latency_ms", 0.0);
    g.generation_latency_ms = j.value("generation_latency_ms", 0.0);
    r.short_context = j.value("short_context", false);
    r.context_ids = j.value("contexts", std::vector<std::string>{});
    r.response = j.at("response").get<ResponseRecord>();
    r.grade = j.at("grade").get<Grade>();
}

namespace {

template <typename T, typename KeyFn>
std::vector<T> read_jsonl(const fs::path& path, KeyFn key_of) {
    std::vector<T> out;
    std::ifstream in(path);
    if (!in) {
        if (!fs::exists(path)) return out;
        throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    }
    std::set<GenerationKey> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        T value;
        try {
            value = json::parse(line).get<T>();
        } catch (const json::exception& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        } catch (const Error& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
        const auto key = key_of(value);
        if (!seen.insert(key).second) {
            throw InvalidInput(
                fmt::format("{}:{}: duplicate record {}", path.string(), line_no, key.to_string()));
        }
        out.push_back(std::move(value));
    }
    return out;
}

}  // namespace

std::vector<RunRecord> load_records(const fs::path& path) {
    return read_jsonl<RunRecord>(path, [](const RunRecord& r) { return r.key(); });
}

void save_records(const fs::path& path, std::vector<RunRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.key() < b.key(); });
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
        for (const auto& r : records) out << json(r).dump() << '\n';
        if (!out.flush()) throw Error(fmt::format("failed writing '{}'", tmp.string()));
    }
    fs::rename(tmp, path);
}

std::vector<ResponseRecord> load_human_answers(const fs::path& path) {
    if (!fs::exists(path)) {
        throw InvalidInput(fmt::format("human answers '{}' do not exist", path.string()));
    }
    return read_jsonl<ResponseRecord>(path, [](const ResponseRecord& r) {
        return GenerationKey{r.system, r.scenario_id, r.repeat_index};
    });
}

}  // namespace preop::harness
