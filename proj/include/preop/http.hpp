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

#include <chrono>
#include <string>
#include <string_view>

#include <json.hpp>

namespace preop::http {

/// `scheme://host[:port]` plus the request path, split from a full URL.
struct Endpoint {
    std::string origin;
    std::string path;
};

Endpoint parse_endpoint(std::string_view url);

struct PostOptions {
    /// Sent as `Authorization: Bearer <token>` when nonempty.
    std::string bearer_token;
    std::chrono::seconds timeout{60};
    int max_attempts = 3;
    std::chrono::milliseconds backoff{250};
};

/// POSTs a JSON document and parses the JSON reply. Connection failures and
/// 5xx/429 replies are retried up to max_attempts; exhausting them throws
/// TransportError. Other non-2xx statuses throw TransportError immediately.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const PostOptions& options);

/// Value of the environment variable `name`, or empty when unset or when
/// `name` is empty.
std::string token_from_env(std::string_view name);

}  // namespace preop::http
