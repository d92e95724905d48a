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

// Data-parallel inner loops of the retrieval path. Each kernel exists twice:
// a plain serial reference and an OpenMP version. Both must produce
// bit-identical output; the tests hold them to that and bench/ times them.

#include <span>
#include <string_view>
#include <vector>

#include "preop/embedding.hpp"
#include "preop/error.hpp"

namespace preop::kernels {

/// Raised by embed_all when texts[index] could not be embedded.
class EmbedFailure : public Error {
 public:
    EmbedFailure(std::size_t index, const std::string& reason)
        : Error(reason), index_(index) {}
    std::size_t index() const noexcept { return index_; }

 private:
    std::size_t index_;
};

namespace serial {

/// Embeds texts[i] into out[i]. Throws EmbedFailure for the first text that
/// fails.
void embed_all(const Embedder& embedder, std::span<const std::string_view> texts,
               std::span<EmbeddingVector> out);

/// scores[i] = dot(query, row i) over a row-major matrix with
/// query.size() columns.
void score_all(std::span<const double> query, std::span<const double> matrix,
               std::span<double> scores);

}  // namespace serial

namespace omp {

/// Parallel over texts. If any embedding throws, EmbedFailure is raised for
/// the lowest failing index after the loop, matching the serial kernel.
void embed_all(const Embedder& embedder, std::span<const std::string_view> texts,
               std::span<EmbeddingVector> out);

void score_all(std::span<const double> query, std::span<const double> matrix,
               std::span<double> scores);

}  // namespace omp

/// Threads OpenMP will use for the parallel kernels.
int max_threads();

}  // namespace preop::kernels
