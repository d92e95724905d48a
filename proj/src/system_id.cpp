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

#include "preop/system_id.hpp"

#include <fmt/format.h>

#include "preop/error.hpp"

namespace preop {

std::string_view to_string(KnowledgeBase kb) {
    switch (kb) {
        case KnowledgeBase::none: return "none";
        case KnowledgeBase::local: return "local";
        case KnowledgeBase::international: return "international";
    }
    return "none";
}

KnowledgeBase parse_knowledge_base(std::string_view s) {
    if (s == "none") return KnowledgeBase::none;
    if (s == "local") return KnowledgeBase::local;
    if (s == "international") return KnowledgeBase::international;
    throw InvalidInput(fmt::format("unknown knowledge base '{}'", s));
}

std::string SystemId::name() const {
    if (knowledge_base == KnowledgeBase::none) return model_name;
    return fmt::format("{}_{}", model_name, to_string(knowledge_base));
}

SystemId SystemId::parse(std::string_view rendered) {
    if (rendered.empty()) throw InvalidInput("empty system name");
    for (auto kb : {KnowledgeBase::local, KnowledgeBase::international}) {
        const auto suffix = fmt::format("_{}", to_string(kb));
        if (rendered.size() > suffix.size() && rendered.ends_with(suffix)) {
            return {std::string(rendered.substr(0, rendered.size() - suffix.size())), kb};
        }
    }
    return {std::string(rendered), KnowledgeBase::none};
}

bool is_human(const SystemId& s) {
    return s.knowledge_base == KnowledgeBase::none && s.model_name == kHumanSystem;
}

}  // namespace preop
