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

// JSON forms of the clinical records. Field names are listed in
// docs/formats.md; enums are written as their lowercase names.

#include <json.hpp>

#include "preop/clinical.hpp"
#include "preop/system_id.hpp"

namespace preop {

void to_json(nlohmann::json& j, const KeyItem& v);
void from_json(const nlohmann::json& j, KeyItem& v);

void to_json(nlohmann::json& j, const AnswerKey& v);
void from_json(const nlohmann::json& j, AnswerKey& v);

void to_json(nlohmann::json& j, const ResponseRecord& v);
void from_json(const nlohmann::json& j, ResponseRecord& v);

void to_json(nlohmann::json& j, const Grade& v);
void from_json(const nlohmann::json& j, Grade& v);

}  // namespace preop
