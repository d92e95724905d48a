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

#include <omp.h>

#include <cstdint>
#include <limits>
#include <string>

#include "preop/kernels.hpp"

namespace preop::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace omp {

void embed_all(const Embedder& embedder, std::span<const std::string_view> texts,
               std::span<EmbeddingVector> out) {
    const auto n = static_cast<std::int64_t>(texts.size());
    std::string first_error;
    std::int64_t first_index = std::numeric_limits<std::int64_t>::max();

#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[i] = embedder.embed(texts[i]);
        } catch (const std::exception& e) {
#pragma omp critical(preop_embed_error)
            {
                if (i < first_index) {
                    first_index = i;
                    first_error = e.what();
                }
            }
        }
    }
    if (first_index != std::numeric_limits<std::int64_t>::max()) {
        throw EmbedFailure(static_cast<std::size_t>(first_index), first_error);
    }
}

void score_all(std::span<const double> query, std::span<const double> matrix,
               std::span<double> scores) {
    const auto dims = query.size();
    const auto n = static_cast<std::int64_t>(scores.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        scores[i] = dot(query, matrix.subspan(static_cast<std::size_t>(i) * dims, dims));
    }
}

}  // namespace omp
}  // namespace preop::kernels
