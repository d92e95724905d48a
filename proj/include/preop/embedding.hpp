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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace preop {

struct EmbeddingVector {
    std::vector<double> components;

    std::size_t dims() const { return components.size(); }
    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

struct EmbedderConfig {
    std::size_t dims = 64;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Text embedding backend. Implementations must be safe to call concurrently.
class Embedder {
 public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::size_t dims() const = 0;
};

/// Deterministic bag-of-words embedder.
///
/// Every distinct lowercased word w gets a unit vector drawn from
/// a SplitMix64 stream seeded with fnv1a64(w) XOR seed; each draw is mapped
/// to a uniform value in [-1, 1) from its top 53 bits. The text embedding is the
/// L2-normalised sum of the word vectors over all occurrences, so word order
/// and letter case do not matter and a chunk's verbatim text embeds to the
/// same vector as the chunk itself.
class MockEmbedder final : public Embedder {
 public:
    explicit MockEmbedder(EmbedderConfig config = {});

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dims() const override { return config_.dims; }
    const EmbedderConfig& config() const { return config_; }

    /// Unit vector for a single (already lowercased) word.
    EmbeddingVector word_vector(std::string_view lowered_word) const;

 private:
    void fill_word(std::string_view lowered_word, std::span<double> out) const;

    EmbedderConfig config_;
};

/// 64-bit FNV-1a.
std::uint64_t hash64(std::string_view bytes);

/// Free-function form of MockEmbedder::embed.
EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& config);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// In-place L2 normalisation; throws on a zero vector.
void normalize(std::vector<double>& v);

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace preop
