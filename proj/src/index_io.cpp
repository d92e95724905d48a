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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/retrieval.hpp"

namespace preop {

static_assert(std::endian::native == std::endian::little,
              "index files are little-endian; add byte swapping for this target");

namespace {

constexpr char kMagic[8] = {'P', 'R', 'E', 'O', 'P', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw InvalidInput(fmt::format("{}: truncated index file", path.string()));
    }
    return v;
}

}  // namespace

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput(fmt::format("cannot write '{}'", path.string()));
    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(index.dims()));
    put(out, static_cast<std::uint64_t>(index.size()));
    for (const auto& e : index.entries()) {
        put(out, static_cast<std::uint32_t>(e.node_id.size()));
        out.write(e.node_id.data(), static_cast<std::streamsize>(e.node_id.size()));
        out.write(reinterpret_cast<const char*>(e.vector.components.data()),
                  static_cast<std::streamsize>(e.vector.components.size() * sizeof(double)));
    }
    if (!out) throw InvalidInput(fmt::format("error writing '{}'", path.string()));
}

VectorIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw InvalidInput(fmt::format("{}: not an index file", path.string()));
    }
    const auto version = get<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw InvalidInput(fmt::format("{}: unsupported index version {}", path.string(), version));
    }
    const auto dims = get<std::uint32_t>(in, path);
    const auto count = get<std::uint64_t>(in, path);
    std::vector<IndexEntry> entries;
    entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = get<std::uint32_t>(in, path);
        IndexEntry e;
        e.node_id.resize(len);
        e.vector.components.resize(dims);
        if (!in.read(e.node_id.data(), len) ||
            !in.read(reinterpret_cast<char*>(e.vector.components.data()),
                     static_cast<std::streamsize>(dims * sizeof(double)))) {
            throw InvalidInput(fmt::format("{}: truncated index file", path.string()));
        }
        entries.push_back(std::move(e));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw InvalidInput(fmt::format("{}: trailing bytes after last entry", path.string()));
    }
    return VectorIndex(dims, std::move(entries));
}

}  // namespace preop
