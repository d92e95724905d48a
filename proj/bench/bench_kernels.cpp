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

// Serial versus OpenMP kernels, and the end-to-end index build and query over
// a 58-document synthetic corpus.

#include <string_view>
#include <vector>

#include <benchmark/benchmark.h>

#include "preop/kernels.hpp"
#include "preop/retrieval.hpp"
#include "synthetic_corpus.hpp"

namespace {

using namespace preop;

struct Fixture {
    std::vector<NodeTree> trees = testing::synthetic_trees(58, 1500);
    MockEmbedder embedder{EmbedderConfig{}};
    std::vector<std::string_view> texts;
    VectorIndex index;
    EmbeddingVector query;

    Fixture() {
        for (const auto& t : trees) {
            for (const auto* leaf : t.leaves()) texts.push_back(leaf->text);
        }
        index = index_build(trees, embedder, Execution::serial);
        query = embedder.embed(texts[texts.size() / 2]);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

template <bool Parallel>
void BM_EmbedAll(benchmark::State& state) {
    const auto& f = fixture();
    std::vector<EmbeddingVector> out(f.texts.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::embed_all(f.embedder, f.texts, out);
        } else {
            kernels::serial::embed_all(f.embedder, f.texts, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.texts.size()));
}

template <bool Parallel>
void BM_ScoreAll(benchmark::State& state) {
    const auto& f = fixture();
    auto q = f.query.components;
    normalize(q);
    std::vector<double> scores(f.index.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::score_all(q, f.index.unit_rows(), scores);
        } else {
            kernels::serial::score_all(q, f.index.unit_rows(), scores);
        }
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.index.size()));
}

void BM_IndexBuild(benchmark::State& state) {
    const auto& f = fixture();
    const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
    for (auto _ : state) benchmark::DoNotOptimize(index_build(f.trees, f.embedder, exec));
}

void BM_TopK(benchmark::State& state) {
    const auto& f = fixture();
    const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
    for (auto _ : state) benchmark::DoNotOptimize(top_k(f.index, f.query, 30, exec));
}

BENCHMARK(BM_EmbedAll<false>)->Name("embed_all/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbedAll<true>)->Name("embed_all/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreAll<false>)->Name("score_all/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreAll<true>)->Name("score_all/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_IndexBuild)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopK)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
