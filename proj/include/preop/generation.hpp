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

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "preop/clinical.hpp"
#include "preop/retrieval.hpp"
#include "preop/system_id.hpp"

namespace preop {

struct GenerationConfig {
    double temperature = 0.1;
    double top_p = 0.90;
    std::size_t max_tokens = 2048;
    /// 4k-context backends: output capped at 1024 tokens and at most 10
    /// retrieved contexts in the prompt.
    bool short_context_mode = false;

    void validate() const;
    std::size_t effective_max_tokens() const;
};

inline constexpr std::size_t kShortContextMaxTokens = 1024;

/// Retriever settings with the short-context cap applied when requested.
RetrieverConfig apply_context_limits(RetrieverConfig retriever, const GenerationConfig& gen);

struct PromptBundle {
    std::string system_prompt;
    std::string user_prompt;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// Role, the eight numbered instruction components and the closing clause.
std::string_view preoperative_system_prompt();

/// Builds the prompt. Contexts are listed in the given order, each under a
/// `[source: <doc_id>]` line and separated by blank lines, followed by the
/// scenario. A native system (knowledge_base none) gets no context block and
/// must not be handed any contexts.
PromptBundle assemble_prompt(const Scenario& scenario, std::span<const ContextNode> contexts,
                             KnowledgeBase knowledge_base);

/// Identity of one generation call.
struct GenerationKey {
    SystemId system;
    std::string scenario_id;
    int repeat_index = 1;

    std::string to_string() const;
    friend bool operator==(const GenerationKey&, const GenerationKey&) = default;
    friend bool operator<(const GenerationKey& a, const GenerationKey& b) {
        return std::forward_as_tuple(a.system.name(), a.scenario_id, a.repeat_index) <
               std::forward_as_tuple(b.system.name(), b.scenario_id, b.repeat_index);
    }
};

struct BackendRequest {
    GenerationKey key;
    PromptBundle prompt;
    double temperature = 0.1;
    double top_p = 0.90;
    std::size_t max_tokens = 2048;
};

struct BackendReply {
    std::string text;
    /// Set when the backend reports stopping on the token limit.
    bool truncated = false;
};

/// An LLM endpoint. Implementations must allow concurrent complete() calls.
class Backend {
 public:
    virtual ~Backend() = default;
    virtual BackendReply complete(const BackendRequest& request) = 0;
};

struct GenerationResult {
    SystemId system;
    std::string scenario_id;
    std::string text;
    double retrieval_latency_ms = 0.0;
    double generation_latency_ms = 0.0;
    int repeat_index = 1;
    bool truncated = false;
};

/// Calls the backend with the decoding parameters (max tokens capped in short
/// context mode) and times the call. The reply text is returned verbatim;
/// `truncated` is set if the backend says so or the reply has more
/// whitespace-delimited words than the token limit.
GenerationResult generate(Backend& backend, const GenerationKey& key, const PromptBundle& bundle,
                          const GenerationConfig& config);

/// Looks responses up in a line-delimited fixture file with records
/// {system, scenario_id, repeat_index, text}.
class ReplayBackend final : public Backend {
 public:
    explicit ReplayBackend(const std::filesystem::path& fixture);
    explicit ReplayBackend(std::map<GenerationKey, std::string> responses);

    BackendReply complete(const BackendRequest& request) override;
    std::size_t size() const { return responses_.size(); }

 private:
    std::map<GenerationKey, std::string> responses_;
};

struct HttpChatConfig {
    std::string endpoint;   // full URL of a chat-completions style endpoint
    std::string token_env;  // env var holding the bearer token
    std::string model;      // sent as "model"; defaults to the system's model name
    int max_attempts = 3;
    int timeout_seconds = 120;
};

/// Generic chat-completion client. Request and response shapes are in
/// docs/formats.md.
class HttpChatBackend final : public Backend {
 public:
    explicit HttpChatBackend(HttpChatConfig config);
    BackendReply complete(const BackendRequest& request) override;

 private:
    HttpChatConfig config_;
};

}  // namespace preop
