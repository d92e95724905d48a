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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace preop {

/// Which knowledge base a guideline belongs to.
enum class Jurisdiction { local, international };

std::string_view to_string(Jurisdiction j);
Jurisdiction parse_jurisdiction(std::string_view s);

struct GuidelineDoc {
    std::string id;
    std::string title;
    Jurisdiction jurisdiction = Jurisdiction::local;
    std::string source_name;
    std::string body;
    std::size_t word_count = 0;
};

/// Half-open interval over a document's word sequence.
struct WordSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool contains(const WordSpan& o) const { return start <= o.start && o.end <= end; }
    bool overlaps(const WordSpan& o) const { return start < o.end && o.start < end; }
    friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

struct ChunkNode {
    std::string id;
    std::string doc_id;
    int level = 0;  // 0 = leaf
    WordSpan span;
    std::string text;
    std::optional<std::string> parent_id;
    std::vector<std::string> child_ids;

    bool is_leaf() const { return level == 0; }
};

/// Hierarchical chunking of one document. Nodes are stored level by level
/// (all leaves first, in span order, then level 1, ...); the root is last.
class NodeTree {
 public:
    NodeTree() = default;
    NodeTree(std::string doc_id, std::vector<std::size_t> level_sizes,
             std::vector<ChunkNode> nodes);

    const std::string& doc_id() const { return doc_id_; }
    const std::vector<std::size_t>& level_sizes() const { return level_sizes_; }
    const std::vector<ChunkNode>& nodes() const { return nodes_; }
    const std::string& root_id() const { return nodes_.back().id; }
    const ChunkNode& root() const { return nodes_.back(); }

    /// Number of levels actually present, counting leaves.
    int depth() const { return nodes_.back().level + 1; }

    const ChunkNode* find(std::string_view id) const;
    const ChunkNode& at(std::string_view id) const;

    /// Leaves in span order.
    std::vector<const ChunkNode*> leaves() const;

 private:
    std::string doc_id_;
    std::vector<std::size_t> level_sizes_;
    std::vector<ChunkNode> nodes_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

inline const std::vector<std::size_t> kDefaultLevelSizes{128, 512, 2048};

/// Reads every regular, non-hidden file in `directory` as a guideline with a
/// `key: value` header block (id, title, jurisdiction, source) terminated by
/// a blank line. Result is sorted by id.
std::vector<GuidelineDoc> load_corpus(const std::filesystem::path& directory);

/// Parses one guideline file's contents. `origin` is used in error messages.
GuidelineDoc parse_guideline(std::string_view contents, std::string_view origin);

/// Builds the chunk hierarchy. Leaves are consecutive windows of
/// level_sizes[0] words. Each higher level greedily packs consecutive nodes of
/// the level below while the packed span stays within that level's size.
/// Building stops as soon as a level has a single node; if the top configured
/// level still has several, a synthetic root spans the whole document.
NodeTree build_tree(const GuidelineDoc& doc,
                    const std::vector<std::size_t>& level_sizes = kDefaultLevelSizes);

void validate_level_sizes(const std::vector<std::size_t>& level_sizes);

/// Node ids look like `<doc_id>#<level>.<index>` with a zero-padded index so
/// lexicographic order matches span order within a level.
std::string make_node_id(std::string_view doc_id, int level, std::size_t index);

}  // namespace preop
