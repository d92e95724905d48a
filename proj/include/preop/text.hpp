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

#include <string>
#include <string_view>
#include <vector>

namespace preop::text {

/// Splits on runs of ASCII whitespace. A word is a maximal run of
/// non-whitespace bytes; the views point into `s`.
std::vector<std::string_view> split_words(std::string_view s);

/// Words of `s` joined by single spaces.
std::string normalize_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

bool contains_icase(std::string_view haystack, std::string_view needle);

}  // namespace preop::text
