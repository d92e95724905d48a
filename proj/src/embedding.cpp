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

#include "preop/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop {

void EmbedderConfig::validate() const {
    if (dims < 2) throw InvalidInput(fmt::format("embedding dims must be >= 2, got {}", dims));
}

std::uint64_t hash64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void normalize(std::vector<double>& v) {
    const double n = norm(v);
    if (n == 0.0 || !std::isfinite(n)) throw InvalidInput("cannot normalise a zero vector");
    for (auto& x : v) x /= n;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dims() != b.dims()) {
        throw InvalidInput(fmt::format("dimension mismatch: {} vs {}", a.dims(), b.dims()));
    }
    const double na = norm(a.components);
    const double nb = norm(b.components);
    if (na == 0.0 || nb == 0.0) throw InvalidInput("cosine of a zero vector");
    return std::clamp(dot(a.components, b.components) / (na * nb), -1.0, 1.0);
}

MockEmbedder::MockEmbedder(EmbedderConfig config) : config_(config) { config_.validate(); }

namespace {

// SplitMix64 step: cheap to seed, which matters because every distinct word
// starts its own stream.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

void MockEmbedder::fill_word(std::string_view lowered_word, std::span<double> out) const {
    std::uint64_t state = hash64(lowered_word) ^ config_.seed;
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    double sq = 0.0;
    for (auto& x : out) {
        x = 2.0 * static_cast<double>(splitmix64(state) >> 11) * kScale - 1.0;
        sq += x * x;
    }
    if (sq == 0.0) throw InvalidInput("cannot normalise a zero vector");
    const double n = std::sqrt(sq);
    for (auto& x : out) x /= n;
}

EmbeddingVector MockEmbedder::word_vector(std::string_view lowered_word) const {
    std::vector<double> v(config_.dims);
    fill_word(lowered_word, v);
    return {std::move(v)};
}

EmbeddingVector MockEmbedder::embed(std::string_view input) const {
    const auto lowered = text::to_lower(input);
    auto words = text::split_words(lowered);
    if (words.empty()) throw InvalidInput("nothing to embed");

    // Accumulate in sorted word order so the floating-point sum is a function
    // of the bag of words alone.
    std::sort(words.begin(), words.end());
    std::vector<double> sum(config_.dims, 0.0);
    std::vector<double> wv(config_.dims);
    for (std::size_t i = 0; i < words.size();) {
        std::size_t j = i + 1;
        while (j < words.size() && words[j] == words[i]) ++j;
        fill_word(words[i], wv);
        const auto count = static_cast<double>(j - i);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += count * wv[k];
        i = j;
    }
    if (norm(sum) == 0.0) throw InvalidInput("nothing to embed");
    normalize(sum);
    return {std::move(sum)};
}

EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& config) {
    return MockEmbedder(config).embed(text);
}

}  // namespace preop
