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

#include "preop/kernels.hpp"

namespace preop::kernels::serial {

void embed_all(const Embedder& embedder, std::span<const std::string_view> texts,
               std::span<EmbeddingVector> out) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            out[i] = embedder.embed(texts[i]);
        } catch (const std::exception& e) {
            throw EmbedFailure(i, e.what());
        }
    }
}

void score_all(std::span<const double> query, std::span<const double> matrix,
               std::span<double> scores) {
    const auto dims = query.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = dot(query, matrix.subspan(i * dims, dims));
    }
}

}  // namespace preop::kernels::serial
