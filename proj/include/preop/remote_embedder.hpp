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

#include <string>

#include "preop/embedding.hpp"
#include "preop/http.hpp"

namespace preop {

struct RemoteEmbedderConfig {
    std::string endpoint;       // full URL, e.g. http://localhost:8080/embed
    std::string token_env;      // name of the env var holding the bearer token
    std::size_t dims = 0;       // expected vector length
    int max_attempts = 3;
};

/// Embedder backed by an HTTP service: POST {"text": ...} -> {"vector": [...]}.
/// Returned vectors are L2-normalised locally.
class RemoteEmbedder final : public Embedder {
 public:
    explicit RemoteEmbedder(RemoteEmbedderConfig config);

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dims() const override { return config_.dims; }

 private:
    RemoteEmbedderConfig config_;
    http::Endpoint endpoint_;
};

}  // namespace preop
