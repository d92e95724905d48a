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

#include "preop/remote_embedder.hpp"

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop {

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config)
    : config_(std::move(config)), endpoint_(http::parse_endpoint(config_.endpoint)) {
    if (config_.dims < 2) throw InvalidInput("remote embedder dims must be >= 2");
}

EmbeddingVector RemoteEmbedder::embed(std::string_view input) const {
    if (text::split_words(input).empty()) throw InvalidInput("nothing to embed");
    http::PostOptions opts;
    opts.bearer_token = http::token_from_env(config_.token_env);
    opts.max_attempts = config_.max_attempts;
    const auto reply = http::post_json(endpoint_, {{"text", std::string(input)}}, opts);
    if (!reply.contains("vector") || !reply["vector"].is_array()) {
        throw InvalidInput("embedding reply has no 'vector' array");
    }
    auto values = reply["vector"].get<std::vector<double>>();
    if (values.size() != config_.dims) {
        throw InvalidInput(fmt::format("embedding reply has {} components, expected {}",
                                       values.size(), config_.dims));
    }
    normalize(values);
    return {std::move(values)};
}

}  // namespace preop
