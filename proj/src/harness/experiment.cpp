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

#include "preop/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "preop/corpus.hpp"
#include "preop/error.hpp"
#include "preop/remote_embedder.hpp"

namespace preop::harness {

namespace fs = std::filesystem;

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
    switch (spec.kind) {
        case BackendSpec::Kind::replay:
            return std::make_unique<ReplayBackend>(spec.fixture);
        case BackendSpec::Kind::http:
            return std::make_unique<HttpChatBackend>(spec.http);
    }
    throw InvalidInput(fmt::format("backend '{}' has no kind", spec.name));
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec) {
    if (spec.remote) return std::make_unique<RemoteEmbedder>(spec.remote_config);
    return std::make_unique<MockEmbedder>(spec.mock);
}

Retriever build_retriever(const fs::path& corpus_dir, std::span<const std::size_t> level_sizes,
                          const Embedder& embedder, const RetrieverConfig& config) {
    const auto docs = load_corpus(corpus_dir);
    std::vector<NodeTree> trees;
    trees.reserve(docs.size());
    for (const auto& d : docs) {
        trees.push_back(build_tree(d, std::vector<std::size_t>(level_sizes.begin(), level_sizes.end())));
    }
    auto index = index_build(trees, embedder);
    return Retriever(NodeStore(std::move(trees)), std::move(index), embedder, config);
}

Study load_study(const RunConfig& config) {
    Study s;
    auto scenarios = load_scenarios(config.scenarios);
    if (config.scenario_ids.empty()) {
        s.scenarios = std::move(scenarios);
    } else {
        for (const auto& id : config.scenario_ids) {
            auto it = std::find_if(scenarios.begin(), scenarios.end(),
                                   [&](const Scenario& sc) { return sc.id == id; });
            if (it == scenarios.end()) throw NotFound(fmt::format("no scenario '{}'", id));
            s.scenarios.push_back(*it);
        }
        std::sort(s.scenarios.begin(), s.scenarios.end(),
                  [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
        s.scenarios.erase(std::unique(s.scenarios.begin(), s.scenarios.end(),
                                      [](const Scenario& a, const Scenario& b) { return a.id == b.id; }),
                          s.scenarios.end());
    }
    for (auto& k : load_answer_keys(config.answer_keys)) {
        auto id = k.scenario_id;
        s.keys.emplace(std::move(id), std::move(k));
    }
    for (const auto& sc : s.scenarios) {
        if (!s.keys.count(sc.id)) throw NotFound(fmt::format("no answer key for scenario '{}'", sc.id));
    }
    return s;
}

RunRecord run_one(const GenerationKey& key, const SystemSpec& system, const Scenario& scenario,
                  const AnswerKey& answer_key, const Retriever* retriever, Backend& backend,
                  const RunConfig& config) {
    const auto kb = system.id.knowledge_base;
    if ((kb == KnowledgeBase::none) != (retriever == nullptr)) {
        throw InvalidInput(fmt::format("{}: retriever does not match knowledge base", key.to_string()));
    }

    auto gen_config = config.generation;
    gen_config.short_context_mode = system.short_context;

    std::vector<ContextNode> contexts;
    double retrieval_ms = 0.0;
    if (retriever) {
        auto r = retriever->retrieve(scenario.free_text);
        const auto limits = apply_context_limits(retriever->config(), gen_config);
        contexts = std::move(r.contexts);
        if (limits.max_context_nodes) {
            contexts = truncate_contexts(std::move(contexts), *limits.max_context_nodes);
        }
        retrieval_ms = r.latency_ms;
    }

    const auto prompt = assemble_prompt(scenario, contexts, kb);
    RunRecord rec;
    rec.generation = generate(backend, key, prompt, gen_config);
    rec.generation.retrieval_latency_ms = retrieval_ms;
    rec.short_context = system.short_context;
    for (const auto& c : contexts) rec.context_ids.push_back(c.node_id);
    rec.response = extract_record(rec.generation.text, answer_key, key.system, key.repeat_index);
    rec.grade = grade(rec.response, answer_key, config.thresholds);
    return rec;
}

RunSummary run_experiment(const RunConfig& config, const BackendFactory& factory) {
    config.validate();
    const auto study = load_study(config);

    const auto embedder = make_embedder(config.embedder);
    std::map<KnowledgeBase, std::unique_ptr<Retriever>> retrievers;
    std::map<std::string, std::unique_ptr<Backend>> backends;
    for (const auto& s : config.systems) {
        const auto kb = s.id.knowledge_base;
        if (kb != KnowledgeBase::none && !retrievers.count(kb)) {
            const auto& dir = kb == KnowledgeBase::local ? config.local_corpus : config.international_corpus;
            retrievers.emplace(kb, std::make_unique<Retriever>(build_retriever(
                                       dir, config.level_sizes, *embedder, config.retriever)));
        }
        if (!backends.count(s.backend)) backends.emplace(s.backend, factory(config.backends.at(s.backend)));
    }

    RunSummary summary;
    summary.records_path = records_path(config);
    auto records = load_records(summary.records_path);
    std::set<GenerationKey> done;
    for (const auto& r : records) done.insert(r.key());

    struct Job {
        GenerationKey key;
        const SystemSpec* system;
        const Scenario* scenario;
    };
    std::vector<Job> jobs;
    for (const auto& s : config.systems) {
        for (const auto& sc : study.scenarios) {
            for (int rep = 1; rep <= config.repeats_for(s); ++rep) {
                GenerationKey key{s.id, sc.id, rep};
                ++summary.planned;
                if (done.count(key)) {
                    ++summary.skipped;
                    continue;
                }
                jobs.push_back({std::move(key), &s, &sc});
            }
        }
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& job = jobs[i];
            const auto kb = job.system->id.knowledge_base;
            const Retriever* retriever = kb == KnowledgeBase::none ? nullptr : retrievers.at(kb).get();
            try {
                auto rec = run_one(job.key, *job.system, *job.scenario, study.keys.at(job.scenario->id),
                                   retriever, *backends.at(job.system->backend), config);
                std::lock_guard lock(mu);
                records.push_back(std::move(rec));
                ++summary.completed;
                save_records(summary.records_path, records);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                summary.failures.push_back({job.key, e.what()});
            }
        }
    };
    const auto n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (summary.completed == 0) save_records(summary.records_path, records);
    std::sort(summary.failures.begin(), summary.failures.end(),
              [](const RunFailure& a, const RunFailure& b) { return a.key < b.key; });
    return summary;
}

std::vector<RunRecord> regrade(std::vector<RunRecord> records,
                               const std::map<std::string, AnswerKey>& keys,
                               std::span<const double> thresholds) {
    for (auto& r : records) {
        auto it = keys.find(r.generation.scenario_id);
        if (it == keys.end()) {
            throw NotFound(fmt::format("no answer key for scenario '{}'", r.generation.scenario_id));
        }
        r.response = extract_record(r.generation.text, it->second, r.generation.system,
                                    r.generation.repeat_index);
        r.grade = grade(r.response, it->second, thresholds);
    }
    return records;
}

}  // namespace preop::harness
