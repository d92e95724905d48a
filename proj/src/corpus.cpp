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

#include "preop/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop {

namespace fs = std::filesystem;

std::string_view to_string(Jurisdiction j) {
    return j == Jurisdiction::local ? "local" : "international";
}

Jurisdiction parse_jurisdiction(std::string_view s) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "local") return Jurisdiction::local;
    if (v == "international") return Jurisdiction::international;
    throw InvalidInput(fmt::format("unknown jurisdiction '{}'", s));
}

NodeTree::NodeTree(std::string doc_id, std::vector<std::size_t> level_sizes,
                   std::vector<ChunkNode> nodes)
    : doc_id_(std::move(doc_id)), level_sizes_(std::move(level_sizes)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidInput("tree without nodes");
    by_id_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) by_id_.emplace(nodes_[i].id, i);
}

const ChunkNode* NodeTree::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

const ChunkNode& NodeTree::at(std::string_view id) const {
    if (const auto* n = find(id)) return *n;
    throw NotFound(fmt::format("unknown node '{}' in tree '{}'", id, doc_id_));
}

std::vector<const ChunkNode*> NodeTree::leaves() const {
    std::vector<const ChunkNode*> out;
    for (const auto& n : nodes_) {
        if (n.is_leaf()) out.push_back(&n);
    }
    return out;
}

std::string make_node_id(std::string_view doc_id, int level, std::size_t index) {
    return fmt::format("{}#{}.{:05d}", doc_id, level, index);
}

GuidelineDoc parse_guideline(std::string_view contents, std::string_view origin) {
    std::map<std::string, std::string> header;
    std::size_t pos = 0;
    bool terminated = false;
    while (pos < contents.size()) {
        auto eol = contents.find('\n', pos);
        if (eol == std::string_view::npos) eol = contents.size();
        auto line = contents.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        if (text::trim(line).empty()) {
            terminated = true;
            break;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidInput(fmt::format("{}: malformed header line '{}'", origin, line));
        }
        header[text::to_lower(text::trim(line.substr(0, colon)))] =
            std::string(text::trim(line.substr(colon + 1)));
    }
    if (!terminated) {
        throw InvalidInput(fmt::format("{}: header not terminated by a blank line", origin));
    }

    auto field = [&](const char* key) -> std::string {
        auto it = header.find(key);
        if (it == header.end() || it->second.empty()) {
            throw InvalidInput(fmt::format("{}: missing header field '{}'", origin, key));
        }
        return it->second;
    };

    GuidelineDoc doc;
    doc.id = field("id");
    doc.title = field("title");
    try {
        doc.jurisdiction = parse_jurisdiction(field("jurisdiction"));
    } catch (const InvalidInput& e) {
        if (header.count("jurisdiction") == 0) throw;
        throw InvalidInput(fmt::format("{}: invalid header field 'jurisdiction': {}", origin,
                                       e.what()));
    }
    doc.source_name = field("source");
    doc.body = std::string(pos < contents.size() ? contents.substr(pos) : std::string_view{});
    doc.word_count = text::split_words(doc.body).size();
    return doc;
}

std::vector<GuidelineDoc> load_corpus(const fs::path& directory) {
    if (!fs::is_directory(directory)) {
        throw InvalidInput(fmt::format("corpus directory '{}' does not exist", directory.string()));
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().starts_with(".")) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<GuidelineDoc> docs;
    std::map<std::string, fs::path> seen;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
        std::ostringstream ss;
        ss << in.rdbuf();
        auto doc = parse_guideline(ss.str(), path.string());
        auto [it, inserted] = seen.emplace(doc.id, path);
        if (!inserted) {
            throw InvalidInput(fmt::format("duplicate document id '{}' in '{}' and '{}'", doc.id,
                                           it->second.string(), path.string()));
        }
        docs.push_back(std::move(doc));
    }
    std::sort(docs.begin(), docs.end(),
              [](const GuidelineDoc& a, const GuidelineDoc& b) { return a.id < b.id; });
    return docs;
}

void validate_level_sizes(const std::vector<std::size_t>& level_sizes) {
    if (level_sizes.empty()) throw InvalidInput("level_sizes must not be empty");
    for (std::size_t i = 0; i < level_sizes.size(); ++i) {
        if (level_sizes[i] < 1) throw InvalidInput("level sizes must be >= 1");
        if (i > 0 && level_sizes[i] <= level_sizes[i - 1]) {
            throw InvalidInput("level_sizes must be strictly increasing");
        }
    }
}

namespace {

std::string join_words(const std::vector<std::string_view>& words, WordSpan span) {
    std::string out;
    for (std::size_t i = span.start; i < span.end; ++i) {
        if (i > span.start) out.push_back(' ');
        out.append(words[i]);
    }
    return out;
}

}  // namespace

NodeTree build_tree(const GuidelineDoc& doc, const std::vector<std::size_t>& level_sizes) {
    validate_level_sizes(level_sizes);
    const auto words = text::split_words(doc.body);
    if (words.empty()) throw InvalidInput(fmt::format("{}: empty document", doc.id));

    std::vector<ChunkNode> nodes;
    // Index range [level_begin, nodes.size()) holds the most recent level.
    std::size_t level_begin = 0;

    const std::size_t leaf_size = level_sizes.front();
    for (std::size_t start = 0, i = 0; start < words.size(); start += leaf_size, ++i) {
        ChunkNode leaf;
        leaf.id = make_node_id(doc.id, 0, i);
        leaf.doc_id = doc.id;
        leaf.level = 0;
        leaf.span = {start, std::min(start + leaf_size, words.size())};
        nodes.push_back(std::move(leaf));
    }

    auto add_parent = [&](int level, std::size_t index, std::size_t first, std::size_t last) {
        ChunkNode parent;
        parent.id = make_node_id(doc.id, level, index);
        parent.doc_id = doc.id;
        parent.level = level;
        parent.span = {nodes[first].span.start, nodes[last - 1].span.end};
        for (std::size_t c = first; c < last; ++c) {
            nodes[c].parent_id = parent.id;
            parent.child_ids.push_back(nodes[c].id);
        }
        nodes.push_back(std::move(parent));
    };

    int level = 0;
    for (std::size_t l = 1; l < level_sizes.size() && nodes.size() - level_begin > 1; ++l) {
        const std::size_t level_end = nodes.size();
        const std::size_t cap = level_sizes[l];
        ++level;
        std::size_t group_start = level_begin;
        std::size_t index = 0;
        std::size_t span_len = 0;
        for (std::size_t c = level_begin; c < level_end; ++c) {
            const auto len = nodes[c].span.length();
            if (c > group_start && span_len + len > cap) {
                add_parent(level, index++, group_start, c);
                group_start = c;
                span_len = 0;
            }
            span_len += len;
        }
        add_parent(level, index, group_start, level_end);
        level_begin = level_end;
    }
    if (nodes.size() - level_begin > 1) {
        add_parent(level + 1, 0, level_begin, nodes.size());
    }

    for (auto& n : nodes) n.text = join_words(words, n.span);
    return NodeTree(doc.id, level_sizes, std::move(nodes));
}

}  // namespace preop
