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

#include "preop/http.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "preop/error.hpp"

namespace preop::http {

Endpoint parse_endpoint(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw InvalidInput(fmt::format("endpoint '{}' has no scheme", url));
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw InvalidInput(fmt::format("unsupported scheme '{}' in '{}'", scheme, url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string_view::npos) {
        ep.origin = std::string(url);
        ep.path = "/";
    } else {
        ep.origin = std::string(url.substr(0, path_start));
        ep.path = std::string(url.substr(path_start));
    }
    return ep;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const PostOptions& options) {
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);

    httplib::Headers headers;
    if (!options.bearer_token.empty()) {
        headers.emplace("Authorization", "Bearer " + options.bearer_token);
    }
    const auto payload = body.dump();

    std::string last_error = "no attempt made";
    const int attempts = std::max(1, options.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(options.backoff * (attempt - 1));
        auto res = client.Post(endpoint.path, headers, payload, "application/json");
        if (!res) {
            last_error = fmt::format("POST {}{} failed: {}", endpoint.origin, endpoint.path,
                                     httplib::to_string(res.error()));
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw TransportError(fmt::format("malformed JSON from {}{}: {}", endpoint.origin,
                                                 endpoint.path, e.what()),
                                     attempt);
            }
        }
        last_error = fmt::format("POST {}{} returned HTTP {}", endpoint.origin, endpoint.path,
                                 res->status);
        if (res->status != 429 && res->status < 500) throw TransportError(last_error, attempt);
    }
    throw TransportError(last_error, attempts);
}

std::string token_from_env(std::string_view name) {
    if (name.empty()) return {};
    const char* v = std::getenv(std::string(name).c_str());
    return v ? std::string(v) : std::string();
}

}  // namespace preop::http
