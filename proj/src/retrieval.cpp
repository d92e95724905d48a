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

#include "preop/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/kernels.hpp"

namespace preop {

VectorIndex::VectorIndex(std::size_t dims, std::vector<IndexEntry> entries)
    : dims_(dims), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].vector.dims() != dims_) {
            throw InvalidInput(fmt::format("index entry '{}' has {} dims, expected {}",
                                           entries_[i].node_id, entries_[i].vector.dims(), dims_));
        }
        if (i > 0 && !(entries_[i - 1].node_id < entries_[i].node_id)) {
            throw InvalidInput(fmt::format("index entries not strictly ordered at '{}'",
                                           entries_[i].node_id));
        }
    }
    unit_rows_.reserve(entries_.size() * dims_);
    for (const auto& e : entries_) {
        const double n = norm(e.vector.components);
        if (n == 0.0) throw InvalidInput(fmt::format("index entry '{}' is a zero vector", e.node_id));
        for (double x : e.vector.components) unit_rows_.push_back(x / n);
    }
}

bool ranks_before(const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_id < b.node_id;
}

void RetrieverConfig::validate() const {
    if (top_k < 1) throw InvalidInput("top_k must be >= 1");
    if (!(merge_threshold > 0.0 && merge_threshold <= 1.0)) {
        throw InvalidInput(fmt::format("merge_threshold must be in (0, 1], got {}", merge_threshold));
    }
    if (max_context_nodes) {
        if (*max_context_nodes < 1) throw InvalidInput("max_context_nodes must be >= 1");
        if (*max_context_nodes > top_k) {
            throw InvalidInput("max_context_nodes must not exceed top_k");
        }
    }
}

NodeStore::NodeStore(std::vector<NodeTree> trees) : trees_(std::move(trees)) {
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        const auto& nodes = trees_[t].nodes();
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            if (!nodes_.emplace(nodes[n].id, Location{t, n}).second) {
                throw InvalidInput(fmt::format("node id '{}' appears in two trees", nodes[n].id));
            }
            if (nodes[n].is_leaf()) ++leaf_count_;
        }
    }
}

const ChunkNode* NodeStore::find(std::string_view node_id) const {
    auto it = nodes_.find(std::string(node_id));
    if (it == nodes_.end()) return nullptr;
    return &trees_[it->second.tree].nodes()[it->second.node];
}

const ChunkNode& NodeStore::at(std::string_view node_id) const {
    if (const auto* n = find(node_id)) return *n;
    throw NotFound(fmt::format("unknown node '{}'", node_id));
}

const NodeTree& NodeStore::tree_of(std::string_view node_id) const {
    auto it = nodes_.find(std::string(node_id));
    if (it == nodes_.end()) throw NotFound(fmt::format("unknown node '{}'", node_id));
    return trees_[it->second.tree];
}

VectorIndex index_build(std::span<const NodeTree> trees, const Embedder& embedder,
                        Execution exec) {
    if (trees.empty()) throw InvalidInput("empty corpus");

    std::vector<const ChunkNode*> leaves;
    for (const auto& tree : trees) {
        for (const auto* leaf : tree.leaves()) leaves.push_back(leaf);
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const ChunkNode* a, const ChunkNode* b) { return a->id < b->id; });

    std::vector<std::string_view> texts;
    texts.reserve(leaves.size());
    for (const auto* leaf : leaves) texts.push_back(leaf->text);

    std::vector<EmbeddingVector> vectors(leaves.size());
    try {
        if (exec == Execution::parallel) {
            kernels::omp::embed_all(embedder, texts, vectors);
        } else {
            kernels::serial::embed_all(embedder, texts, vectors);
        }
    } catch (const kernels::EmbedFailure& e) {
        throw InvalidInput(
            fmt::format("failed to embed leaf '{}': {}", leaves[e.index()]->id, e.what()));
    }

    std::vector<IndexEntry> entries;
    entries.reserve(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        entries.push_back({leaves[i]->id, std::move(vectors[i])});
    }
    return VectorIndex(embedder.dims(), std::move(entries));
}

std::vector<RetrievalHit> top_k(const VectorIndex& index, const EmbeddingVector& query,
                                std::size_t k, Execution exec) {
    if (query.dims() != index.dims()) {
        throw InvalidInput(
            fmt::format("query has {} dims, index has {}", query.dims(), index.dims()));
    }
    if (k < 1) throw InvalidInput("k must be >= 1");
    const double qn = norm(query.components);
    if (qn == 0.0) throw InvalidInput("zero query vector");

    std::vector<double> unit_query = query.components;
    for (auto& x : unit_query) x /= qn;

    const auto& entries = index.entries();
    std::vector<double> scores(entries.size());
    if (exec == Execution::parallel) {
        kernels::omp::score_all(unit_query, index.unit_rows(), scores);
    } else {
        kernels::serial::score_all(unit_query, index.unit_rows(), scores);
    }

    std::vector<RetrievalHit> hits;
    hits.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        hits.push_back({entries[i].node_id, std::clamp(scores[i], -1.0, 1.0)});
    }
    const auto n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                      ranks_before);
    hits.resize(n);
    return hits;
}

}  // namespace preop
