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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "preop/corpus.hpp"
#include "preop/embedding.hpp"

namespace preop {

enum class Execution { serial, parallel };

struct IndexEntry {
    std::string node_id;
    EmbeddingVector vector;

    friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

/// One embedding per leaf, ordered by node id. Immutable once built.
class VectorIndex {
 public:
    VectorIndex() = default;
    /// Checks that every vector has `dims` nonzero components and that ids
    /// are strictly ascending.
    VectorIndex(std::size_t dims, std::vector<IndexEntry> entries);

    std::size_t dims() const { return dims_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<IndexEntry>& entries() const { return entries_; }

    /// Row-major copy of the entries, each row scaled to unit length.
    const std::vector<double>& unit_rows() const { return unit_rows_; }

    friend bool operator==(const VectorIndex& a, const VectorIndex& b) {
        return a.dims_ == b.dims_ && a.entries_ == b.entries_;
    }

 private:
    std::size_t dims_ = 0;
    std::vector<IndexEntry> entries_;
    std::vector<double> unit_rows_;
};

struct RetrievalHit {
    std::string node_id;
    double score = 0.0;
};

/// Descending score, then ascending node id.
bool ranks_before(const RetrievalHit& a, const RetrievalHit& b);

struct RetrieverConfig {
    std::size_t top_k = 30;
    double merge_threshold = 0.5;
    std::optional<std::size_t> max_context_nodes;

    void validate() const;
};

/// Cap applied to backends with a 4k context window.
inline constexpr std::size_t kShortContextNodes = 10;

/// A retrieved (possibly merged) chunk handed to the prompt.
struct ContextNode {
    std::string node_id;
    std::string doc_id;
    std::string text;
    double score = 0.0;                   // max over provenance leaf scores
    std::vector<std::string> provenance;  // retrieved leaves absorbed, ascending
};

/// Owns a set of trees and resolves node ids across them.
class NodeStore {
 public:
    NodeStore() = default;
    explicit NodeStore(std::vector<NodeTree> trees);

    const std::vector<NodeTree>& trees() const { return trees_; }
    const ChunkNode* find(std::string_view node_id) const;
    const ChunkNode& at(std::string_view node_id) const;
    /// Tree holding `node_id`; throws NotFound.
    const NodeTree& tree_of(std::string_view node_id) const;
    std::size_t leaf_count() const { return leaf_count_; }

 private:
    struct Location {
        std::size_t tree;
        std::size_t node;
    };
    std::vector<NodeTree> trees_;
    std::unordered_map<std::string, Location> nodes_;
    std::size_t leaf_count_ = 0;
};

/// Embeds every leaf of every tree once.
VectorIndex index_build(std::span<const NodeTree> trees, const Embedder& embedder,
                        Execution exec = Execution::parallel);

/// Exhaustive cosine search; returns min(k, size) hits ordered by ranks_before.
std::vector<RetrievalHit> top_k(const VectorIndex& index, const EmbeddingVector& query,
                                std::size_t k, Execution exec = Execution::parallel);

/// Replaces retrieved leaves by ancestors whose fraction of "merged"
/// children reaches `threshold`, level by level up to the root. A merged
/// node absorbs every retrieved leaf beneath it, so the output nodes are
/// pairwise disjoint and each retrieved leaf lands in exactly one
/// provenance list. Output is ordered by descending score, then node id.
std::vector<ContextNode> auto_merge(const NodeStore& store, std::span<const RetrievalHit> hits,
                                    double threshold);

/// First min(limit, size) contexts. limit must be >= 1.
std::vector<ContextNode> truncate_contexts(std::vector<ContextNode> contexts, std::size_t limit);

/// Binary index file: see docs/formats.md. Round trips are bit-exact.
void save_index(const VectorIndex& index, const std::filesystem::path& path);
VectorIndex load_index(const std::filesystem::path& path);

struct Retrieval {
    std::vector<RetrievalHit> hits;
    std::vector<ContextNode> contexts;
    double latency_ms = 0.0;
};

/// top_k + auto_merge (+ truncation when max_context_nodes is set) over one
/// knowledge base.
class Retriever {
 public:
    Retriever(NodeStore store, VectorIndex index, const Embedder& embedder,
              RetrieverConfig config);

    Retrieval retrieve(std::string_view query) const;

    const NodeStore& store() const { return store_; }
    const VectorIndex& index() const { return index_; }
    const RetrieverConfig& config() const { return config_; }

 private:
    NodeStore store_;
    VectorIndex index_;
    const Embedder* embedder_;
    RetrieverConfig config_;
};

}  // namespace preop
