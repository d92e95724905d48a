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

#include "preop/text.hpp"

namespace preop::text {
namespace {

TEST(Text, SplitWordsOnAnyWhitespace) {
    const auto w = split_words("  alpha\tbeta\n\ngamma  ");
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[0], "alpha");
    EXPECT_EQ(w[2], "gamma");
    EXPECT_TRUE(split_words(" \n\t ").empty());
    EXPECT_TRUE(split_words("").empty());
}

TEST(Text, NormalizeWhitespaceJoinsWithSingleSpaces) {
    EXPECT_EQ(normalize_whitespace("\n a  b\t\tc \n"), "a b c");
}

TEST(Text, LowerTrimContains) {
    EXPECT_EQ(to_lower("HbA1C 9.4%"), "hba1c 9.4%");
    EXPECT_EQ(trim("  x y \n"), "x y");
    EXPECT_TRUE(contains_icase("Seen by a DOCTOR", "doctor"));
    EXPECT_FALSE(contains_icase("nurse", "doctor"));
}

}  // namespace
}  // namespace preop::text
