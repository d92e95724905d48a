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

#include <fstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "preop/error.hpp"
#include "preop/generation.hpp"
#include "preop/http.hpp"

namespace preop {

ReplayBackend::ReplayBackend(std::map<GenerationKey, std::string> responses)
    : responses_(std::move(responses)) {}

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture) {
    std::ifstream in(fixture);
    if (!in) throw InvalidInput(fmt::format("cannot read replay fixture '{}'", fixture.string()));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        GenerationKey key;
        std::string body;
        try {
            const auto j = nlohmann::json::parse(line);
            key.system = SystemId::parse(j.at("system").get<std::string>());
            key.scenario_id = j.at("scenario_id").get<std::string>();
            key.repeat_index = j.at("repeat_index").get<int>();
            body = j.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", fixture.string(), lineno, e.what()));
        }
        if (!responses_.emplace(key, std::move(body)).second) {
            throw InvalidInput(fmt::format("{}:{}: duplicate replay key {}", fixture.string(),
                                           lineno, key.to_string()));
        }
    }
}

BackendReply ReplayBackend::complete(const BackendRequest& request) {
    auto it = responses_.find(request.key);
    if (it == responses_.end()) {
        throw NotFound(fmt::format("no replay response for {}", request.key.to_string()));
    }
    return {it->second, false};
}

HttpChatBackend::HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {
    http::parse_endpoint(config_.endpoint);
}

BackendReply HttpChatBackend::complete(const BackendRequest& request) {
    const nlohmann::json body = {
        {"model", config_.model.empty() ? request.key.system.model_name : config_.model},
        {"messages",
         {{{"role", "system"}, {"content", request.prompt.system_prompt}},
          {{"role", "user"}, {"content", request.prompt.user_prompt}}}},
        {"temperature", request.temperature},
        {"top_p", request.top_p},
        {"max_tokens", request.max_tokens},
    };
    http::PostOptions opts;
    opts.bearer_token = http::token_from_env(config_.token_env);
    opts.max_attempts = config_.max_attempts;
    opts.timeout = std::chrono::seconds(config_.timeout_seconds);
    const auto reply = http::post_json(http::parse_endpoint(config_.endpoint), body, opts);
    try {
        const auto& choice = reply.at("choices").at(0);
        BackendReply out;
        out.text = choice.at("message").at("content").get<std::string>();
        out.truncated = choice.value("finish_reason", std::string()) == "length";
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("unexpected chat completion reply: {}", e.what()));
    }
}

}  // namespace preop
