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

#include "preop/harness/config.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "preop/corpus.hpp"
#include "preop/error.hpp"

namespace preop::harness {

namespace fs = std::filesystem;
using nlohmann::json;

int RunConfig::repeats_for(const SystemSpec& system) const {
    if (system.repeats) return *system.repeats;
    return system.id.name() == reference_system ? 4 : 1;
}

void RunConfig::validate(bool check_paths) const {
    validate_level_sizes(level_sizes);
    retriever.validate();
    generation.validate();
    if (!embedder.remote) embedder.mock.validate();
    if (systems.empty()) throw InvalidInput("config lists no systems");
    if (parallelism < 1) throw InvalidInput("parallelism must be >= 1");
    if (!(primary_threshold > 0.0 && primary_threshold <= 1.0)) {
        throw InvalidInput("primary_threshold must be in (0, 1]");
    }
    if (thresholds.empty()) throw InvalidInput("thresholds must not be empty");
    for (double t : thresholds) {
        if (!(t > 0.0 && t <= 1.0)) throw InvalidInput(fmt::format("threshold {} outside (0, 1]", t));
    }
    if (std::find(thresholds.begin(), thresholds.end(), primary_threshold) == thresholds.end()) {
        throw InvalidInput("primary_threshold must be one of thresholds");
    }

    bool reference_found = false;
    std::vector<std::string> names;
    for (const auto& s : systems) {
        const auto name = s.id.name();
        if (std::find(names.begin(), names.end(), name) != names.end()) {
            throw InvalidInput(fmt::format("system '{}' listed twice", name));
        }
        names.push_back(name);
        reference_found = reference_found || name == reference_system;
        if (!backends.count(s.backend)) {
            throw InvalidInput(fmt::format("system '{}' uses unknown backend '{}'", name, s.backend));
        }
        if (repeats_for(s) < 1) throw InvalidInput(fmt::format("system '{}': repeats must be >= 1", name));
        if (s.id.knowledge_base == KnowledgeBase::local && local_corpus.empty()) {
            throw InvalidInput(fmt::format("system '{}' needs corpus.local", name));
        }
        if (s.id.knowledge_base == KnowledgeBase::international && international_corpus.empty()) {
            throw InvalidInput(fmt::format("system '{}' needs corpus.international", name));
        }
    }
    if (!reference_found) {
        throw InvalidInput(
            fmt::format("reference system '{}' is not among the systems", reference_system));
    }

    if (!check_paths) return;
    auto must_exist = [](const fs::path& p, const char* what) {
        if (!p.empty() && !fs::exists(p)) {
            throw InvalidInput(fmt::format("{} '{}' does not exist", what, p.string()));
        }
    };
    must_exist(local_corpus, "corpus.local");
    must_exist(international_corpus, "corpus.international");
    if (scenarios.empty()) throw InvalidInput("config needs 'scenarios'");
    if (answer_keys.empty()) throw InvalidInput("config needs 'answer_keys'");
    must_exist(scenarios, "scenarios");
    must_exist(answer_keys, "answer_keys");
    for (const auto& h : human_answers) must_exist(h, "human_answers entry");
    if (score_sheets) must_exist(*score_sheets, "score_sheets");
    if (published_fitness_table) must_exist(*published_fitness_table, "published_fitness_table");
    for (const auto& [name, b] : backends) {
        if (b.kind == BackendSpec::Kind::replay) must_exist(b.fixture, "replay fixture");
    }
}

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
    auto path_of = [&](const json& v) -> fs::path {
        fs::path p = v.get<std::string>();
        return p.is_absolute() ? p : base_dir / p;
    };

    RunConfig c;
    try {
        if (doc.contains("corpus")) {
            const auto& corpus = doc.at("corpus");
            if (corpus.contains("local")) c.local_corpus = path_of(corpus.at("local"));
            if (corpus.contains("international")) {
                c.international_corpus = path_of(corpus.at("international"));
            }
        }
        if (doc.contains("level_sizes")) {
            c.level_sizes = doc.at("level_sizes").get<std::vector<std::size_t>>();
        }
        if (doc.contains("embedder")) {
            const auto& e = doc.at("embedder");
            const auto type = e.value("type", std::string("mock"));
            if (type == "mock") {
                c.embedder.mock.dims = e.value("dims", std::size_t{64});
                c.embedder.mock.seed = e.value("seed", std::uint64_t{0});
            } else if (type == "remote") {
                c.embedder.remote = true;
                c.embedder.remote_config.endpoint = e.at("endpoint").get<std::string>();
                c.embedder.remote_config.token_env = e.value("token_env", std::string());
                c.embedder.remote_config.dims = e.at("dims").get<std::size_t>();
            } else {
                throw InvalidInput(fmt::format("unknown embedder type '{}'", type));
            }
        }
        if (doc.contains("retriever")) {
            const auto& r = doc.at("retriever");
            c.retriever.top_k = r.value("top_k", c.retriever.top_k);
            c.retriever.merge_threshold = r.value("merge_threshold", c.retriever.merge_threshold);
            if (r.contains("max_context_nodes") && !r.at("max_context_nodes").is_null()) {
                c.retriever.max_context_nodes = r.at("max_context_nodes").get<std::size_t>();
            }
        }
        if (doc.contains("generation")) {
            const auto& g = doc.at("generation");
            c.generation.temperature = g.value("temperature", c.generation.temperature);
            c.generation.top_p = g.value("top_p", c.generation.top_p);
            c.generation.max_tokens = g.value("max_tokens", c.generation.max_tokens);
        }
        if (doc.contains("scenarios")) c.scenarios = path_of(doc.at("scenarios"));
        if (doc.contains("answer_keys")) c.answer_keys = path_of(doc.at("answer_keys"));
        if (doc.contains("scenario_ids")) {
            c.scenario_ids = doc.at("scenario_ids").get<std::vector<std::string>>();
        }
        if (doc.contains("human_answers")) {
            for (const auto& h : doc.at("human_answers")) c.human_answers.push_back(path_of(h));
        }
        if (doc.contains("score_sheets")) c.score_sheets = path_of(doc.at("score_sheets"));
        if (doc.contains("published_fitness_table")) {
            c.published_fitness_table = path_of(doc.at("published_fitness_table"));
        }
        if (doc.contains("backends")) {
            const auto& bs = doc.at("backends");
            for (auto it = bs.begin(); it != bs.end(); ++it) {
                BackendSpec b;
                b.name = it.key();
                const auto& v = it.value();
                const auto type = v.at("type").get<std::string>();
                if (type == "replay") {
                    b.kind = BackendSpec::Kind::replay;
                    b.fixture = path_of(v.at("fixture"));
                } else if (type == "http") {
                    b.kind = BackendSpec::Kind::http;
                    b.http.endpoint = v.at("endpoint").get<std::string>();
                    b.http.token_env = v.value("token_env", std::string());
                    b.http.model = v.value("model", std::string());
                    b.http.max_attempts = v.value("max_attempts", 3);
                    b.http.timeout_seconds = v.value("timeout_seconds", 120);
                } else {
                    throw InvalidInput(fmt::format("backend '{}': unknown type '{}'", b.name, type));
                }
                c.backends.emplace(b.name, std::move(b));
            }
        }
        if (doc.contains("systems")) {
            for (const auto& s : doc.at("systems")) {
                SystemSpec spec;
                spec.id = SystemId::parse(s.at("name").get<std::string>());
                spec.backend = s.at("backend").get<std::string>();
                if (s.contains("repeats")) spec.repeats = s.at("repeats").get<int>();
                spec.short_context = s.value("short_context", false);
                c.systems.push_back(std::move(spec));
            }
        }
        c.reference_system = doc.value("reference_system", c.reference_system);
        if (doc.contains("thresholds")) c.thresholds = doc.at("thresholds").get<std::vector<double>>();
        c.primary_threshold = doc.value("primary_threshold", c.primary_threshold);
        c.parallelism = doc.value("parallelism", c.parallelism);
        if (doc.contains("output_dir")) c.output_dir = path_of(doc.at("output_dir"));
    } catch (const json::exception& e) {
        throw InvalidInput(fmt::format("config: {}", e.what()));
    }
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot read config '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
    return parse_run_config(doc, fs::absolute(path).parent_path());
}

}  // namespace preop::harness
