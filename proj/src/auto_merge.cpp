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

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/retrieval.hpp"

namespace preop {

namespace {

// Merge state for one tree. Nodes are stored children-before-parents, so a
// single forward sweep is the level-ascending pass and a reverse sweep visits
// parents before children.
struct TreeMerge {
    const NodeTree* tree = nullptr;
    std::map<std::size_t, double> retrieved;  // leaf position -> best score
};

std::size_t position_of(const NodeTree& tree, const ChunkNode& node) {
    return static_cast<std::size_t>(&node - tree.nodes().data());
}

}  // namespace

std::vector<ContextNode> auto_merge(const NodeStore& store, std::span<const RetrievalHit> hits,
                                    double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InvalidInput(fmt::format("merge threshold must be in (0, 1], got {}", threshold));
    }

    std::map<std::string, TreeMerge> per_tree;
    for (const auto& hit : hits) {
        const auto* node = store.find(hit.node_id);
        if (!node) throw NotFound(fmt::format("hit references unknown node '{}'", hit.node_id));
        if (!node->is_leaf()) {
            throw InvalidInput(fmt::format("hit references non-leaf node '{}'", hit.node_id));
        }
        const auto& tree = store.tree_of(hit.node_id);
        auto& tm = per_tree[tree.doc_id()];
        tm.tree = &tree;
        const auto pos = position_of(tree, *node);
        auto [it, inserted] = tm.retrieved.emplace(pos, hit.score);
        if (!inserted) it->second = std::max(it->second, hit.score);
    }

    std::vector<ContextNode> out;
    for (const auto& [doc_id, tm] : per_tree) {
        const auto& nodes = tm.tree->nodes();
        std::unordered_map<std::string_view, std::size_t> pos;
        for (std::size_t i = 0; i < nodes.size(); ++i) pos.emplace(nodes[i].id, i);

        std::vector<char> marked(nodes.size(), 0);
        for (const auto& [p, score] : tm.retrieved) marked[p] = 1;

        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.is_leaf()) continue;
            std::size_t hit_children = 0;
            for (const auto& c : n.child_ids) hit_children += marked[pos.at(c)];
            const double fraction = static_cast<double>(hit_children) /
                                    static_cast<double>(n.child_ids.size());
            if (fraction >= threshold) {
                marked[i] = 1;
            }
        }

        // A marked node absorbs everything beneath it: keep only marked
        // nodes without a marked ancestor.
        std::vector<char> covered(nodes.size(), 0);
        std::vector<std::size_t> emitted;
        for (std::size_t i = nodes.size(); i-- > 0;) {
            const auto& n = nodes[i];
            const bool parent_covered = n.parent_id && covered[pos.at(*n.parent_id)];
            covered[i] = parent_covered || marked[i];
            if (marked[i] && !parent_covered) emitted.push_back(i);
        }

        std::map<std::size_t, ContextNode> contexts;
        for (auto i : emitted) {
            ContextNode cn;
            cn.node_id = nodes[i].id;
            cn.doc_id = nodes[i].doc_id;
            cn.text = nodes[i].text;
            cn.score = -2.0;
            contexts.emplace(i, std::move(cn));
        }
        for (const auto& [leaf, score] : tm.retrieved) {
            // Climb to the topmost marked ancestor-or-self.
            std::size_t owner = leaf;
            for (std::size_t cur = leaf; nodes[cur].parent_id;) {
                cur = pos.at(*nodes[cur].parent_id);
                if (marked[cur]) owner = cur;
            }
            auto& cn = contexts.at(owner);
            cn.provenance.push_back(nodes[leaf].id);
            cn.score = std::max(cn.score, score);
        }
        for (auto& [i, cn] : contexts) {
            std::sort(cn.provenance.begin(), cn.provenance.end());
            out.push_back(std::move(cn));
        }
    }

    std::sort(out.begin(), out.end(), [](const ContextNode& a, const ContextNode& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node_id < b.node_id;
    });
    return out;
}

std::vector<ContextNode> truncate_contexts(std::vector<ContextNode> contexts, std::size_t limit) {
    if (limit < 1) throw InvalidInput("context limit must be >= 1");
    if (contexts.size() > limit) contexts.resize(limit);
    return contexts;
}

Retriever::Retriever(NodeStore store, VectorIndex index, const Embedder& embedder,
                     RetrieverConfig config)
    : store_(std::move(store)), index_(std::move(index)), embedder_(&embedder), config_(config) {
    config_.validate();
    if (index_.dims() != embedder.dims()) {
        throw InvalidInput(fmt::format("index has {} dims but embedder produces {}",
                                       index_.dims(), embedder.dims()));
    }
    if (index_.size() != store_.leaf_count()) {
        throw InvalidInput(fmt::format("index has {} entries but the corpus has {} leaves",
                                       index_.size(), store_.leaf_count()));
    }
    for (const auto& e : index_.entries()) {
        const auto* n = store_.find(e.node_id);
        if (!n || !n->is_leaf()) {
            throw InvalidInput(fmt::format("index entry '{}' is not a corpus leaf", e.node_id));
        }
    }
}

Retrieval Retriever::retrieve(std::string_view query) const {
    const auto start = std::chrono::steady_clock::now();
    Retrieval r;
    const auto q = embedder_->embed(query);
    r.hits = top_k(index_, q, config_.top_k);
    r.contexts = auto_merge(store_, r.hits, config_.merge_threshold);
    if (config_.max_context_nodes) {
        r.contexts = truncate_contexts(std::move(r.contexts), *config_.max_context_nodes);
    }
    r.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return r;
}

}  // namespace preop
