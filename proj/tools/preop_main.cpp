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

// preop: command-line front end for ingest, indexing, retrieval, runs and
// reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "preop/corpus.hpp"
#include "preop/error.hpp"
#include "preop/generation.hpp"
#include "preop/harness/config.hpp"
#include "preop/harness/experiment.hpp"
#include "preop/harness/records.hpp"
#include "preop/harness/report.hpp"
#include "preop/retrieval.hpp"

namespace fs = std::filesystem;
using namespace preop;
using namespace preop::harness;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold;
};

RunConfig resolve_config(const Globals& g) {
    if (g.config.empty()) throw InvalidInput("--config is required for this command");
    auto c = load_run_config(g.config);
    if (!g.out.empty()) c.output_dir = g.out;
    if (g.seed) c.embedder.mock.seed = *g.seed;
    if (g.threshold) {
        c.primary_threshold = *g.threshold;
        if (std::find(c.thresholds.begin(), c.thresholds.end(), *g.threshold) == c.thresholds.end()) {
            c.thresholds.push_back(*g.threshold);
            std::sort(c.thresholds.begin(), c.thresholds.end());
        }
    }
    return c;
}

/// Corpus directory, level sizes and embedder from flags, falling back to the
/// config when one is given.
struct CorpusArgs {
    std::string corpus;
    std::string knowledge_base = "international";
    std::vector<std::size_t> level_sizes;
};

struct CorpusSetup {
    fs::path dir;
    std::vector<std::size_t> level_sizes = kDefaultLevelSizes;
    EmbedderSpec embedder;
    RetrieverConfig retriever;
};

CorpusSetup resolve_corpus(const Globals& g, const CorpusArgs& a) {
    CorpusSetup s;
    if (!g.config.empty()) {
        const auto c = resolve_config(g);
        s.level_sizes = c.level_sizes;
        s.embedder = c.embedder;
        s.retriever = c.retriever;
        s.dir = parse_knowledge_base(a.knowledge_base) == KnowledgeBase::local ? c.local_corpus
                                                                                : c.international_corpus;
    }
    if (!a.corpus.empty()) s.dir = a.corpus;
    if (!a.level_sizes.empty()) s.level_sizes = a.level_sizes;
    if (g.seed) s.embedder.mock.seed = *g.seed;
    if (s.dir.empty()) throw InvalidInput("give --corpus or --config");
    validate_level_sizes(s.level_sizes);
    return s;
}

std::vector<NodeTree> build_trees(const CorpusSetup& s) {
    std::vector<NodeTree> trees;
    for (const auto& d : load_corpus(s.dir)) trees.push_back(build_tree(d, s.level_sizes));
    return trees;
}

int cmd_ingest(const Globals& g, const CorpusArgs& a) {
    const auto s = resolve_corpus(g, a);
    const auto docs = load_corpus(s.dir);
    std::size_t leaves = 0, nodes = 0;
    fmt::print("{:<32} {:>8} {:>7} {:>7} {:>6}\n", "document", "words", "leaves", "nodes", "depth");
    for (const auto& d : docs) {
        const auto t = build_tree(d, s.level_sizes);
        const auto n_leaves = t.leaves().size();
        leaves += n_leaves;
        nodes += t.nodes().size();
        fmt::print("{:<32} {:>8} {:>7} {:>7} {:>6}\n", d.id, d.word_count, n_leaves, t.nodes().size(),
                   t.depth());
    }
    fmt::print("{} documents, {} leaves, {} nodes\n", docs.size(), leaves, nodes);
    return 0;
}

int cmd_index(const Globals& g, const CorpusArgs& a, const std::string& index_path) {
    const auto s = resolve_corpus(g, a);
    const auto trees = build_trees(s);
    const auto embedder = make_embedder(s.embedder);
    const auto index = index_build(trees, *embedder);
    fs::path out = index_path;
    if (out.empty()) out = fs::path(g.out.empty() ? "." : g.out) / "index.bin";
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_index(index, out);
    fmt::print("indexed {} leaves ({} dims) into {}\n", index.size(), index.dims(), out.string());
    return 0;
}

int cmd_retrieve(const Globals& g, const CorpusArgs& a, const std::string& index_path,
                 const std::string& query, std::optional<std::size_t> top_k, bool short_context) {
    auto s = resolve_corpus(g, a);
    auto trees = build_trees(s);
    const auto embedder = make_embedder(s.embedder);
    auto index = index_path.empty() ? index_build(trees, *embedder) : load_index(index_path);
    if (top_k) s.retriever.top_k = *top_k;
    GenerationConfig gen;
    gen.short_context_mode = short_context;
    s.retriever = apply_context_limits(s.retriever, gen);
    const Retriever retriever(NodeStore(std::move(trees)), std::move(index), *embedder, s.retriever);
    const auto r = retriever.retrieve(query);
    fmt::print("{} hits, {} contexts, {:.3f} ms\n", r.hits.size(), r.contexts.size(), r.latency_ms);
    for (const auto& c : r.contexts) {
        fmt::print("\n[{}] score {:.6f} from {} leaves\n{}\n", c.node_id, c.score, c.provenance.size(),
                   c.text);
    }
    return 0;
}

int cmd_run(const Globals& g) {
    const auto c = resolve_config(g);
    const auto summary = run_experiment(c);
    fmt::print("planned {}, skipped {}, completed {}, failed {}\n", summary.planned, summary.skipped,
               summary.completed, summary.failures.size());
    for (const auto& f : summary.failures) {
        fmt::print(stderr, "failed {}: {}\n", f.key.to_string(), f.message);
    }
    fmt::print("records: {}\n", summary.records_path.string());
    return summary.failures.empty() ? 0 : 1;
}

int cmd_grade(const Globals& g) {
    const auto c = resolve_config(g);
    const auto path = records_path(c);
    auto records = load_records(path);
    if (records.empty()) throw InvalidInput(fmt::format("no records in '{}'", path.string()));
    const auto study = load_study(c);
    records = regrade(std::move(records), study.keys, c.thresholds);
    std::size_t fit = 0;
    for (const auto& r : records) fit += r.grade.fitness_correct ? 1 : 0;
    save_records(path, records);
    fmt::print("re-graded {} records; {} with correct fitness\n", records.size(), fit);
    return 0;
}

int cmd_report(const Globals& g) {
    const auto c = resolve_config(g);
    c.validate();
    ReportInputs in;
    in.records = load_records(records_path(c));
    const auto study = load_study(c);
    in.scenarios = study.scenarios;
    in.keys = study.keys;
    for (const auto& h : c.human_answers) {
        auto answers = load_human_answers(h);
        in.human_answers.insert(in.human_answers.end(), answers.begin(), answers.end());
    }
    in.reference_system = c.reference_system;
    in.thresholds = c.thresholds;
    in.primary_threshold = c.primary_threshold;
    if (c.score_sheets) in.score_sheets = load_score_sheets(*c.score_sheets);
    if (c.published_fitness_table) in.published_fitness = load_published_fitness(*c.published_fitness_table);

    const auto report = build_report(in);
    const auto dir = c.output_dir / "report";
    write_report(report, dir);
    std::ifstream all(dir / "report.txt");
    std::cout << all.rdbuf();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preoperative guideline RAG pipeline and evaluation harness"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--out", g.out, "output directory (overrides the config)");
    app.add_option("--seed", g.seed, "mock embedder seed");
    app.add_option("--threshold", g.threshold, "primary grading alignment threshold in (0, 1]")
        ->check(CLI::Range(0.0, 1.0));

    CorpusArgs corpus;
    auto add_corpus = [&](CLI::App* sub) {
        sub->add_option("--corpus", corpus.corpus, "guideline directory");
        sub->add_option("--kb", corpus.knowledge_base, "knowledge base taken from the config")
            ->check(CLI::IsMember({"local", "international"}));
        sub->add_option("--level-sizes", corpus.level_sizes, "words per node level, smallest first");
    };

    auto* ingest = app.add_subcommand("ingest", "validate a guideline corpus and show its node trees");
    add_corpus(ingest);

    std::string index_path;
    auto* index = app.add_subcommand("index", "build and persist the leaf index");
    add_corpus(index);
    index->add_option("--index", index_path, "index file to write (default <out>/index.bin)");

    std::string query;
    std::optional<std::size_t> top_k;
    bool short_context = false;
    auto* retrieve = app.add_subcommand("retrieve", "run an ad-hoc query and print the merged contexts");
    add_corpus(retrieve);
    retrieve->add_option("--index", index_path, "previously built index file");
    retrieve->add_option("--query,-q", query, "query text")->required();
    retrieve->add_option("--top-k", top_k, "leaves to retrieve");
    retrieve->add_flag("--short-context", short_context, "keep at most 10 contexts");

    auto* run = app.add_subcommand("run", "execute every generation in the config");
    auto* grade_cmd = app.add_subcommand("grade", "re-extract and re-grade persisted responses");
    auto* report = app.add_subcommand("report", "write the report tables");

    CLI11_PARSE(app, argc, argv);
    if (app.get_subcommands().empty()) {
        std::cerr << app.help() << "a subcommand is required\n";
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(g, corpus);
        if (*index) return cmd_index(g, corpus, index_path);
        if (*retrieve) return cmd_retrieve(g, corpus, index_path, query, top_k, short_context);
        if (*run) return cmd_run(g);
        if (*grade_cmd) return cmd_grade(g);
        if (*report) return cmd_report(g);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
