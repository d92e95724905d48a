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

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <httplib.h>

#include "preop/error.hpp"
#include "preop/generation.hpp"
#include "preop/http.hpp"
#include "preop/remote_embedder.hpp"

namespace preop {
namespace {

using nlohmann::json;

// Scripted local server: each POST pops the next status from the script
// (200 once the script runs out) and records the request.
class LocalServer {
 public:
    explicit LocalServer(std::vector<int> script = {}) : script_(std::move(script)) {
        server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mu_);
            bodies_.push_back(json::parse(req.body));
            auth_.push_back(req.get_header_value("Authorization"));
            paths_.push_back(req.path);
            const int status = calls_ < script_.size() ? script_[calls_] : 200;
            ++calls_;
            res.status = status;
            if (status != 200) {
                res.set_content("{\"error\":\"scripted\"}", "application/json");
            } else if (req.path == "/embed") {
                res.set_content(embed_reply_, "application/json");
            } else {
                res.set_content(chat_reply_, "application/json");
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }

    std::string url(const std::string& path) const { return fmt::format("http://127.0.0.1:{}{}", port_, path); }
    std::size_t calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }
    json body(std::size_t i) const {
        std::lock_guard lock(mu_);
        return bodies_.at(i);
    }
    std::string auth(std::size_t i) const {
        std::lock_guard lock(mu_);
        return auth_.at(i);
    }
    std::string path(std::size_t i) const {
        std::lock_guard lock(mu_);
        return paths_.at(i);
    }

    std::string embed_reply_ = R"({"vector":[3.0,4.0]})";
    std::string chat_reply_ =
        R"({"choices":[{"message":{"role":"assistant","content":"Triage: yes"},"finish_reason":"stop"}]})";

 private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mu_;
    std::vector<int> script_;
    std::size_t calls_ = 0;
    std::vector<json> bodies_;
    std::vector<std::string> auth_;
    std::vector<std::string> paths_;
};

TEST(Http, ParseEndpoint) {
    auto ep = http::parse_endpoint("http://localhost:8080/v1/chat");
    EXPECT_EQ(ep.origin, "http://localhost:8080");
    EXPECT_EQ(ep.path, "/v1/chat");
    ep = http::parse_endpoint("https://example.org");
    EXPECT_EQ(ep.origin, "https://example.org");
    EXPECT_EQ(ep.path, "/");
    EXPECT_THROW(http::parse_endpoint("localhost:80/x"), InvalidInput);
    EXPECT_THROW(http::parse_endpoint("ftp://h/x"), InvalidInput);
}

TEST(Http, TokenFromEnv) {
    ::setenv("PREOP_TEST_TOKEN", "sekret", 1);
    EXPECT_EQ(http::token_from_env("PREOP_TEST_TOKEN"), "sekret");
    EXPECT_EQ(http::token_from_env(""), "");
    ::unsetenv("PREOP_TEST_TOKEN_MISSING");
    EXPECT_EQ(http::token_from_env("PREOP_TEST_TOKEN_MISSING"), "");
}

TEST(Http, RetriesServerErrorsThenSucceeds) {
    LocalServer server({503, 500});
    http::PostOptions opts;
    opts.backoff = std::chrono::milliseconds(1);
    const auto reply = http::post_json(http::parse_endpoint(server.url("/embed")), {{"text", "x"}}, opts);
    EXPECT_EQ(reply["vector"].size(), 2u);
    EXPECT_EQ(server.calls(), 3u);
}

TEST(Http, GivesUpAfterMaxAttempts) {
    LocalServer server({500, 502, 503, 504});
    http::PostOptions opts;
    opts.backoff = std::chrono::milliseconds(1);
    opts.max_attempts = 3;
    try {
        http::post_json(http::parse_endpoint(server.url("/embed")), {}, opts);
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_NE(std::string(e.what()).find("HTTP 503"), std::string::npos);
    }
    EXPECT_EQ(server.calls(), 3u);
}

TEST(Http, ClientErrorsAreNotRetried) {
    LocalServer server({401});
    http::PostOptions opts;
    opts.backoff = std::chrono::milliseconds(1);
    try {
        http::post_json(http::parse_endpoint(server.url("/embed")), {}, opts);
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.attempts(), 1);
    }
    EXPECT_EQ(server.calls(), 1u);
}

TEST(Http, TooManyRequestsIsRetried) {
    LocalServer server({429});
    http::PostOptions opts;
    opts.backoff = std::chrono::milliseconds(1);
    EXPECT_NO_THROW(http::post_json(http::parse_endpoint(server.url("/embed")), {}, opts));
    EXPECT_EQ(server.calls(), 2u);
}

TEST(Http, MalformedJsonIsATransportError) {
    LocalServer server;
    server.embed_reply_ = "{not json";
    EXPECT_THROW(http::post_json(http::parse_endpoint(server.url("/embed")), {}, {}), TransportError);
}

TEST(Http, ConnectionRefused) {
    int port;
    {
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    http::PostOptions opts;
    opts.max_attempts = 2;
    opts.backoff = std::chrono::milliseconds(1);
    opts.timeout = std::chrono::seconds(2);
    EXPECT_THROW(http::post_json(http::parse_endpoint(fmt::format("http://127.0.0.1:{}/x", port)), {}, opts),
                 TransportError);
}

TEST(RemoteEmbedder, SendsTextAndNormalizesReply) {
    LocalServer server;
    ::setenv("PREOP_EMBED_TOKEN", "abc", 1);
    const RemoteEmbedder embedder({server.url("/embed"), "PREOP_EMBED_TOKEN", 2, 1});
    const auto v = embedder.embed("hello world");
    ASSERT_EQ(v.dims(), 2u);
    EXPECT_DOUBLE_EQ(v.components[0], 0.6);
    EXPECT_DOUBLE_EQ(v.components[1], 0.8);
    EXPECT_EQ(server.body(0), json({{"text", "hello world"}}));
    EXPECT_EQ(server.auth(0), "Bearer abc");
}

TEST(RemoteEmbedder, RejectsBadReplies) {
    LocalServer server;
    const RemoteEmbedder three({server.url("/embed"), "", 3, 1});
    EXPECT_THROW(three.embed("x"), InvalidInput);
    server.embed_reply_ = R"({"embedding":[1,2]})";
    const RemoteEmbedder two({server.url("/embed"), "", 2, 1});
    EXPECT_THROW(two.embed("x"), InvalidInput);
    EXPECT_THROW(two.embed("   "), InvalidInput);
    EXPECT_THROW(RemoteEmbedder({server.url("/embed"), "", 1, 1}), InvalidInput);
}

TEST(HttpChatBackend, SendsChatRequest) {
    LocalServer server;
    HttpChatConfig config{server.url("/v1/chat/completions"), "", "", 1, 10};
    HttpChatBackend backend(config);
    BackendRequest req;
    req.key = {SystemId{"GPT4", KnowledgeBase::international}, "01", 1};
    req.prompt = {"system text", "user text"};
    req.max_tokens = 1024;
    const auto reply = backend.complete(req);
    EXPECT_EQ(reply.text, "Triage: yes");
    EXPECT_FALSE(reply.truncated);
    const auto body = server.body(0);
    EXPECT_EQ(server.path(0), "/v1/chat/completions");
    EXPECT_EQ(body["model"], "GPT4");
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][0]["content"], "system text");
    EXPECT_EQ(body["messages"][1]["content"], "user text");
    EXPECT_EQ(body["max_tokens"], 1024);
    EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.1);
    EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.9);
}

TEST(HttpChatBackend, ModelOverrideAndTruncation) {
    LocalServer server;
    server.chat_reply_ = R"({"choices":[{"message":{"content":"cut"},"finish_reason":"length"}]})";
    HttpChatBackend backend({server.url("/chat"), "", "served-model", 1, 10});
    BackendRequest req;
    req.key = {SystemId{"Llama3-8b", KnowledgeBase::local}, "02", 1};
    const auto reply = backend.complete(req);
    EXPECT_TRUE(reply.truncated);
    EXPECT_EQ(server.body(0)["model"], "served-model");
}

TEST(HttpChatBackend, MalformedReply) {
    LocalServer server;
    server.chat_reply_ = R"({"choices":[]})";
    HttpChatBackend backend({server.url("/chat"), "", "", 1, 10});
    EXPECT_THROW(backend.complete({}), InvalidInput);
    EXPECT_THROW(HttpChatBackend({"nope", "", "", 1, 10}), InvalidInput);
}

}  // namespace
}  // namespace preop
