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

#include <gtest/gtest.h>

#include "preop/error.hpp"
#include "preop/system_id.hpp"

namespace preop {
namespace {

TEST(SystemId, RendersNameWithKnowledgeBase) {
    EXPECT_EQ((SystemId{"GPT4", KnowledgeBase::international}).name(), "GPT4_international");
    EXPECT_EQ((SystemId{"Llama3-8b", KnowledgeBase::local}).name(), "Llama3-8b_local");
    EXPECT_EQ((SystemId{"Gemini", KnowledgeBase::none}).name(), "Gemini");
}

TEST(SystemId, ParseRoundTrips) {
    for (const char* name : {"GPT4_international", "Llama3-8b_local", "Gemini", "HumanDoctor",
                             "my_model_local", "a_b"}) {
        EXPECT_EQ(SystemId::parse(name).name(), name);
    }
    const auto s = SystemId::parse("my_model_local");
    EXPECT_EQ(s.model_name, "my_model");
    EXPECT_EQ(s.knowledge_base, KnowledgeBase::local);
    // A bare suffix is a model name, not an empty model with a knowledge base.
    EXPECT_EQ(SystemId::parse("_local").knowledge_base, KnowledgeBase::none);
    EXPECT_THROW(SystemId::parse(""), InvalidInput);
}

TEST(SystemId, KnowledgeBaseStrings) {
    for (auto kb : {KnowledgeBase::none, KnowledgeBase::local, KnowledgeBase::international}) {
        EXPECT_EQ(parse_knowledge_base(to_string(kb)), kb);
    }
    EXPECT_THROW(parse_knowledge_base("regional"), InvalidInput);
}

TEST(SystemId, HumanPseudoSystem) {
    EXPECT_TRUE(is_human(SystemId::parse("HumanDoctor")));
    EXPECT_FALSE(is_human(SystemId::parse("HumanDoctor_local")));
    EXPECT_FALSE(is_human(SystemId::parse("GPT4")));
}

TEST(SystemId, OrdersByName) {
    EXPECT_LT((SystemId{"A", KnowledgeBase::local}), (SystemId{"B", KnowledgeBase::none}));
}

}  // namespace
}  // namespace preop
