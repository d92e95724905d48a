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

#include <compare>
#include <string>
#include <string_view>

namespace preop {

/// Which guideline corpus grounds a system. `none` is the native model.
enum class KnowledgeBase { none, local, international };

std::string_view to_string(KnowledgeBase kb);
KnowledgeBase parse_knowledge_base(std::string_view s);

/// A model paired with a knowledge base. Rendered as `<model>`,
/// `<model>_local` or `<model>_international`.
struct SystemId {
    std::string model_name;
    KnowledgeBase knowledge_base = KnowledgeBase::none;

    std::string name() const;

    /// Inverse of name(): a trailing `_local` / `_international` selects the
    /// knowledge base, anything else is a native model.
    static SystemId parse(std::string_view rendered);

    friend bool operator==(const SystemId&, const SystemId&) = default;
    friend auto operator<=>(const SystemId& a, const SystemId& b) { return a.name() <=> b.name(); }
};

/// Pseudo-system under which human clinicians' answers are filed.
inline constexpr std::string_view kHumanSystem = "HumanDoctor";

bool is_human(const SystemId& s);

}  // namespace preop
