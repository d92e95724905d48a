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

#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "preop/embedding.hpp"
#include "preop/error.hpp"

namespace preop {
namespace {

TEST(Hash64, MatchesFnv1aReferenceValues) {
    EXPECT_EQ(hash64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(hash64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hash64("foobar"), 0x85944171f73967e8ULL);
}

TEST(MockEmbedder, DeterministicUnitVectors) {
    const MockEmbedder e;
    const auto a = e.embed("fasting six hours before induction");
    const auto b = e.embed("fasting six hours before induction");
    EXPECT_EQ(a.components, b.components);
    EXPECT_EQ(a.dims(), 64u);
    EXPECT_NEAR(norm(a.components), 1.0, 1e-12);
    EXPECT_NEAR(cosine(a, b), 1.0, 1e-12);
}

TEST(MockEmbedder, BagOfWordsIgnoresOrderAndCase) {
    const MockEmbedder e;
    EXPECT_EQ(e.embed("alpha beta").components, e.embed("beta alpha").components);
    EXPECT_EQ(e.embed("Alpha BETA").components, e.embed("alpha beta").components);
    EXPECT_EQ(e.embed(" alpha\n\tbeta ").components, e.embed("alpha beta").components);
}

TEST(MockEmbedder, DistinctWordsAreFarApart) {
    const MockEmbedder e;
    const double c = cosine(e.embed("alpha"), e.embed("omega"));
    EXPECT_LT(c, 0.9);
    // Regression value for the default config, computed outside the library.
    EXPECT_NEAR(c, 0.1255067549956956, 1e-12);
}

TEST(MockEmbedder, RepeatedWordsWeighTheSum) {
    const MockEmbedder e;
    const auto a = e.word_vector("a");
    const auto b = e.word_vector("b");
    std::vector<double> sum(64);
    for (std::size_t i = 0; i < 64; ++i) sum[i] = 2 * a.components[i] + b.components[i];
    normalize(sum);
    const auto got = e.embed("a b a");
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(got.components[i], sum[i], 1e-12);
}

TEST(MockEmbedder, WordVectorComponentsAreSymmetricDraws) {
    const MockEmbedder e(EmbedderConfig{512, 3});
    const auto v = e.word_vector("spread");
    double mean = 0.0;
    int positive = 0;
    for (double x : v.components) {
        mean += x;
        positive += x > 0;
    }
    EXPECT_NEAR(norm(v.components), 1.0, 1e-12);
    EXPECT_NEAR(mean / 512.0, 0.0, 0.01);
    EXPECT_GT(positive, 200);
    EXPECT_LT(positive, 312);
}

TEST(MockEmbedder, SeedChangesEveryVector) {
    const MockEmbedder s0(EmbedderConfig{64, 0});
    const MockEmbedder s1(EmbedderConfig{64, 1});
    gen::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto w = gen::word(rng);
        EXPECT_NE(s0.embed(w).components, s1.embed(w).components) << w;
    }
}

TEST(MockEmbedder, RejectsEmptyTextAndTinyDims) {
    const MockEmbedder e;
    try {
        e.embed(" \n\t");
        FAIL();
    } catch (const InvalidInput& err) {
        EXPECT_STREQ(err.what(), "nothing to embed");
    }
    EXPECT_THROW(MockEmbedder(EmbedderConfig{1, 0}), InvalidInput);
    EXPECT_THROW(embed_text("", EmbedderConfig{}), InvalidInput);
}

TEST(Cosine, IdentityAntipodalOrthogonal) {
    EmbeddingVector v{{0.3, -0.4, 1.2}};
    EmbeddingVector neg{{-0.3, 0.4, -1.2}};
    EXPECT_NEAR(cosine(v, v), 1.0, 1e-12);
    EXPECT_NEAR(cosine(v, neg), -1.0, 1e-12);
    EXPECT_EQ(cosine(EmbeddingVector{{1, 0}}, EmbeddingVector{{0, 1}}), 0.0);
}

TEST(Cosine, RejectsMismatchAndZero) {
    EXPECT_THROW(cosine(EmbeddingVector{{1, 0}}, EmbeddingVector{{1, 0, 0}}), InvalidInput);
    EXPECT_THROW(cosine(EmbeddingVector{{0, 0}}, EmbeddingVector{{1, 0}}), InvalidInput);
}

TEST(CosineProperty, BoundedAndSymmetric) {
    gen::Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const auto dims = rng.uniform(2, 16);
        EmbeddingVector a, b;
        for (std::size_t k = 0; k < dims; ++k) {
            a.components.push_back(rng.real(-1e3, 1e3));
            b.components.push_back(rng.coin(0.1) ? a.components[k] * 3 : rng.real(-1e-3, 1e-3));
        }
        const double c = cosine(a, b);
        ASSERT_LE(std::abs(c), 1.0);
        ASSERT_EQ(c, cosine(b, a));
        ASSERT_NEAR(cosine(a, a), 1.0, 1e-9);
    }
}

}  // namespace
}  // namespace preop
