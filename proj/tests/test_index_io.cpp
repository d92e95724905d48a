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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "preop/corpus.hpp"
#include "preop/embedding.hpp"
#include "preop/error.hpp"
#include "preop/retrieval.hpp"

namespace preop {
namespace {

namespace fs = std::filesystem;

class IndexFile : public ::testing::Test {
 protected:
    void SetUp() override {
        path_ = fs::temp_directory_path() /
                fmt::format("preop-index-{}.bin", ::testing::UnitTest::GetInstance()->current_test_info()->name());
    }
    void TearDown() override { fs::remove(path_); }

    std::string bytes() const {
        std::ifstream in(path_, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }
    void write(const std::string& b) const { std::ofstream(path_, std::ios::binary) << b; }

    fs::path path_;
};

VectorIndex sample_index() {
    std::vector<IndexEntry> entries;
    entries.push_back({"a#L0.00000", {{0.1, -0.2, std::numeric_limits<double>::denorm_min()}}});
    entries.push_back({"b#L0.00000", {{1.0 / 3.0, 2.0, -1e300}}});
    entries.push_back({"c", {{-0.0, 5e-324, 1.0}}});
    return VectorIndex(3, std::move(entries));
}

TEST_F(IndexFile, RoundTripIsBitExact) {
    const auto index = sample_index();
    save_index(index, path_);
    const auto loaded = load_index(path_);
    ASSERT_EQ(loaded.size(), index.size());
    EXPECT_EQ(loaded.dims(), 3u);
    for (std::size_t i = 0; i < index.size(); ++i) {
        EXPECT_EQ(loaded.entries()[i].node_id, index.entries()[i].node_id);
        EXPECT_EQ(std::memcmp(loaded.entries()[i].vector.components.data(),
                              index.entries()[i].vector.components.data(), 3 * sizeof(double)),
                  0);
    }
    save_index(loaded, path_.string() + ".2");
    std::ifstream a(path_, std::ios::binary), b(path_.string() + ".2", std::ios::binary);
    EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
              std::string(std::istreambuf_iterator<char>(b), {}));
    fs::remove(path_.string() + ".2");
}

TEST_F(IndexFile, RoundTripOfRealIndex) {
    GuidelineDoc d{"g", "t", Jurisdiction::local, "s", "", 0};
    for (int i = 0; i < 300; ++i) d.body += fmt::format("word{} ", i % 37);
    const std::vector<NodeTree> trees{build_tree(d, {16, 64})};
    const auto index = index_build(trees, MockEmbedder());
    save_index(index, path_);
    EXPECT_EQ(load_index(path_), index);
}

TEST_F(IndexFile, RejectsWrongMagic) {
    save_index(sample_index(), path_);
    auto b = bytes();
    b[0] = 'X';
    write(b);
    EXPECT_THROW(load_index(path_), InvalidInput);
}

TEST_F(IndexFile, RejectsUnknownVersion) {
    save_index(sample_index(), path_);
    auto b = bytes();
    b[8] = 2;
    write(b);
    try {
        load_index(path_);
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported index version 2"), std::string::npos);
    }
}

TEST_F(IndexFile, RejectsEveryTruncation) {
    save_index(sample_index(), path_);
    const auto full = bytes();
    for (std::size_t n = 0; n < full.size(); ++n) {
        write(full.substr(0, n));
        EXPECT_THROW(load_index(path_), InvalidInput) << "length " << n;
    }
}

TEST_F(IndexFile, RejectsTrailingBytes) {
    save_index(sample_index(), path_);
    write(bytes() + "x");
    try {
        load_index(path_);
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("trailing bytes"), std::string::npos);
    }
}

TEST_F(IndexFile, MissingFile) { EXPECT_THROW(load_index(path_), InvalidInput); }

}  // namespace
}  // namespace preop
