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

#include "preop/generation.hpp"

#include <chrono>

#include <fmt/format.h>

#include "preop/error.hpp"
#include "preop/text.hpp"

namespace preop {

void GenerationConfig::validate() const {
    if (!(temperature >= 0.0)) throw InvalidInput("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw InvalidInput("top_p must be in (0, 1]");
    if (max_tokens < 1) throw InvalidInput("max_tokens must be >= 1");
}

std::size_t GenerationConfig::effective_max_tokens() const {
    return short_context_mode ? std::min(max_tokens, kShortContextMaxTokens) : max_tokens;
}

RetrieverConfig apply_context_limits(RetrieverConfig retriever, const GenerationConfig& gen) {
    if (gen.short_context_mode) {
        const auto cap = std::min(kShortContextNodes, retriever.top_k);
        retriever.max_context_nodes =
            retriever.max_context_nodes ? std::min(*retriever.max_context_nodes, cap) : cap;
    }
    return retriever;
}

std::string_view preoperative_system_prompt() {
    static const std::string prompt =
        "You are the anesthesiologist seeing this patient in the preoperative clinic two weeks "
        "before the date of operation. The patients have already taken their routine "
        "preoperative investigations and the findings are listed within the clinical summary.\n"
        "\n"
        "Your role is to evaluate the clinical summary and give the preoperative anesthesia "
        "instructions for the following patient targeted to your fellow medical colleagues. You "
        "are to follow strictly the department's guidelines.\n"
        "\n"
        "Your instructions should consist of the following components:\n"
        "1. Should the patient be seen by a Doctor or a Nurse - Doctor/Nurse\n"
        "2. Fasting instructions - list instructions based on the number of hours before the "
        "time of the listed surgery\n"
        "3. Suitability for preoperative carbohydrate loading - yes/no.\n"
        "4. Medication instructions - name each medication and give the instructions for the "
        "day of the operation and days leading up to the operation as required.\n"
        "5. Any instructions for the healthcare team - for example, preoperative blood group "
        "matching, arranging for preoperative dialysis, or standby post-operative high "
        "dependency/ICU beds.\n"
        "6. Any preoperative optimization required for the patient - list what needs to be "
        "optimized.\n"
        "7. Any need to delay the operation for further medical workup and preoperative "
        "optimization?\n"
        "8. Any specific department protocols to follow for this patient - name as many as "
        "necessary, and give short reasoning for using these protocols.\n"
        "\n"
        "Your instructions are the final instructions, do not give uncertain answers. If the "
        "medical condition is already optimized, there is no need to offer further "
        "optimization. If there are no relevant instructions in any of the above categories, "
        "leave it blank and write NA.";
    return prompt;
}

PromptBundle assemble_prompt(const Scenario& scenario, std::span<const ContextNode> contexts,
                             KnowledgeBase knowledge_base) {
    if (text::trim(scenario.free_text).empty()) {
        throw InvalidInput(fmt::format("scenario {} has no free text", scenario.id));
    }
    if (knowledge_base == KnowledgeBase::none && !contexts.empty()) {
        throw InvalidInput("contexts forbidden for native system");
    }
    PromptBundle b;
    b.system_prompt = std::string(preoperative_system_prompt());
    if (knowledge_base != KnowledgeBase::none) {
        b.user_prompt += "Guideline context:\n\n";
        for (const auto& c : contexts) {
            b.user_prompt += fmt::format("[source: {}]\n{}\n\n", c.doc_id, c.text);
        }
    }
    b.user_prompt += fmt::format("Clinical scenario {}\n\n{}\n", scenario.id, scenario.free_text);
    return b;
}

std::string GenerationKey::to_string() const {
    return fmt::format("({}, scenario {}, repeat {})", system.name(), scenario_id, repeat_index);
}

GenerationResult generate(Backend& backend, const GenerationKey& key, const PromptBundle& bundle,
                          const GenerationConfig& config) {
    config.validate();
    BackendRequest req;
    req.key = key;
    req.prompt = bundle;
    req.temperature = config.temperature;
    req.top_p = config.top_p;
    req.max_tokens = config.effective_max_tokens();

    const auto start = std::chrono::steady_clock::now();
    auto reply = backend.complete(req);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    GenerationResult r;
    r.system = key.system;
    r.scenario_id = key.scenario_id;
    r.repeat_index = key.repeat_index;
    r.generation_latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    r.truncated = reply.truncated || text::split_words(reply.text).size() > req.max_tokens;
    r.text = std::move(reply.text);
    return r;
}

}  // namespace preop
