/**
 * Copyright 2026 The VL-SCC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vlscc/codec2d.hpp"

#include <gtest/gtest.h>
#include <torch/torch.h>

#include <random>

namespace vlscc {
namespace {

Codec2dConfig narrow(std::optional<int> fixed = std::nullopt)
{
    Codec2dConfig c;
    c.feature_channels = 8;
    c.sce_channels = 8;
    c.symbols = 8;
    c.rate_channels = 8;
    c.levels = 16;
    c.seed = 5;
    c.fixed_symbols = fixed;
    return c;
}

TEST(Codec2d, DefaultWidthsOnPatch)
{
    Codec2d codec(Codec2dConfig{});
    torch::NoGradGuard guard;
    const auto img = torch::rand({1, 3, 128, 128});
    const auto x = codec->semantic_encode(img);
    EXPECT_EQ(x.sizes(), (std::vector<int64_t>{1, 256, 32, 32}));
    const auto r = codec->rate_map(x);
    EXPECT_EQ(r.sizes(), (std::vector<int64_t>{1, 8, 8}));
    EXPECT_GT(r.min().item<double>(), 0.0);
    EXPECT_LT(r.max().item<double>(), 1.0);
    const auto y = codec->encode_symbols(x, r);
    EXPECT_EQ(y.sizes(), (std::vector<int64_t>{1, 512, 8, 8}));
    const auto xh = codec->reconstruct_features(y, torch::full({1, 8, 8}, 10.0));
    EXPECT_EQ(xh.sizes(), (std::vector<int64_t>{1, 256, 32, 32}));
    EXPECT_EQ(codec->semantic_decode(xh).sizes(), (std::vector<int64_t>{1, 3, 128, 128}));
}

TEST(Codec2d, ShapeChainForDivisibleSizes)
{
    Codec2d codec(narrow());
    torch::NoGradGuard guard;
    for (int h : {32, 64, 128}) {
        for (int w : {32, 64, 128}) {
            const auto out = codec->forward(torch::rand({2, 3, h, w}), noiseless_channel());
            ASSERT_EQ(out.features.sizes(), (std::vector<int64_t>{2, 8, h / 4, w / 4}));
            ASSERT_EQ(out.symbols.sizes(), (std::vector<int64_t>{2, 8, h / 16, w / 16}));
            ASSERT_EQ(out.rate_map.sizes(), (std::vector<int64_t>{2, h / 16, w / 16}));
            ASSERT_EQ(out.features_hat.sizes(), out.features.sizes());
            ASSERT_EQ(out.reconstruction.sizes(), (std::vector<int64_t>{2, 3, h, w}));
            ASSERT_GE(out.reconstruction.min().item<double>(), 0.0);
            ASSERT_LE(out.reconstruction.max().item<double>(), 1.0);
        }
    }
    EXPECT_THROW(codec->forward(torch::rand({1, 3, 40, 32}), noiseless_channel()), std::invalid_argument);
}

TEST(Codec2d, Deterministic)
{
    Codec2d a(narrow()), b(narrow());
    const auto img = torch::rand({2, 3, 32, 32});
    torch::NoGradGuard guard;
    EXPECT_TRUE(torch::equal(a->forward(img, noiseless_channel()).reconstruction,
                             b->forward(img, noiseless_channel()).reconstruction));
}

TEST(Codec2d, RateEntryActsLocally)
{
    Codec2d codec(narrow());
    torch::NoGradGuard guard;
    const auto x = codec->semantic_encode(torch::rand({1, 3, 128, 128}));
    const auto r = codec->rate_map(x);
    auto r2 = r.clone();
    r2[0][0][0] = r[0][0][0].item<double>() < 0.5 ? 0.95 : 0.05;
    const auto a = codec->encode_symbols(x, r);
    const auto b = codec->encode_symbols(x, r2);
    const auto diff = (a - b).abs().sum(1)[0];  // [8, 8]
    EXPECT_GT(diff[0][0].item<double>(), 0.0);
    EXPECT_EQ(diff[7][7].item<double>(), 0.0);
}

TEST(Codec2d, QuantMapConditionsDecoder)
{
    Codec2d codec(narrow());
    torch::NoGradGuard guard;
    const auto p = torch::randn({1, 8, 2, 2});
    const auto a = codec->reconstruct_features(p, torch::full({1, 2, 2}, 3.0));
    const auto b = codec->reconstruct_features(p, torch::full({1, 2, 2}, 12.0));
    EXPECT_FALSE(torch::allclose(a, b));
    EXPECT_TRUE(torch::equal(a, codec->reconstruct_features(p, torch::full({1, 2, 2}, 3.0))));
}

TEST(GatherScatter, Example)
{
    // 1x1 fiber [a, b, c, d] with q giving two kept symbols.
    const QuantMap q(1, 1, 3, {1});
    const std::vector<double> y{1, 2, 3, 4};
    const auto kept = gather_kept(y, make_mask_tensor(q, 4));
    EXPECT_EQ(kept, (std::vector<double>{1, 2}));
    EXPECT_TRUE(gather_kept(y, make_mask_tensor(QuantMap(1, 1, 3, {0}), 4)).empty());
}

TEST(GatherScatter, MutualInverseOnSmallShapes)
{
    std::mt19937_64 rng(2);
    for (int rows = 1; rows <= 4; ++rows) {
        for (int cols = 1; cols <= 4; ++cols) {
            for (int n = 1; n <= 8; ++n) {
                for (int trial = 0; trial < 8; ++trial) {
                    const int levels = std::uniform_int_distribution<int>(2, 9)(rng);
                    QuantMap q(rows, cols, levels);
                    for (auto& v : q.values)
                        v = std::uniform_int_distribution<int>(0, levels - 1)(rng);
                    const auto m = make_mask_tensor(q, n);
                    std::vector<double> y(m.bits.size()), masked(m.bits.size());
                    for (std::size_t k = 0; k < y.size(); ++k) {
                        y[k] = std::normal_distribution<double>()(rng);
                        masked[k] = y[k] * m.bits[k];
                    }
                    const auto kept = gather_kept(masked, m);
                    ASSERT_EQ(kept.size(), kept_symbols(q, n));
                    ASSERT_EQ(scatter_padded(kept, q, n), masked);
                }
            }
        }
    }
}

TEST(Codec2d, ShortenedPathMatchesMaskedPath)
{
    Codec2d codec(narrow());
    codec->eval();
    const auto img = torch::rand({3, 3, 64, 64});
    const auto frames = codec->encode(img);
    torch::NoGradGuard guard;
    const auto train_path = codec->forward(img, noiseless_channel());
    for (std::size_t b = 0; b < frames.size(); ++b) {
        const auto padded = frames[b].padded();  // rows x cols x N
        const auto rec = train_path.received[static_cast<int64_t>(b)].permute({1, 2, 0}).contiguous().view({-1});
        for (std::size_t k = 0; k < padded.size(); ++k)
            ASSERT_NEAR(rec[static_cast<int64_t>(k)].item<double>(), padded[k], 1e-5);
        ASSERT_EQ(frames[b].kept.size(), kept_symbols(frames[b].quant, 8));
    }
    EXPECT_TRUE(torch::allclose(codec->decode(frames), train_path.reconstruction, 1e-4, 1e-4));
}

TEST(Codec2d, FixedLength)
{
    Codec2d codec(narrow(3));
    const auto frames = codec->encode(torch::rand({2, 3, 32, 32}));
    for (const auto& f : frames) {
        EXPECT_TRUE(f.fixed_length());
        EXPECT_EQ(f.kept.size(), 4u * 3u);
    }
    EXPECT_EQ(codec->decode(frames).sizes(), (std::vector<int64_t>{2, 3, 32, 32}));
}

TEST(ImageTensors, RoundTrip)
{
    std::vector<Image> imgs(2, Image(16, 32));
    imgs[1].at(3, 4, 2) = 0.75f;
    const auto t = images_to_tensor(imgs);
    EXPECT_EQ(t.sizes(), (std::vector<int64_t>{2, 3, 16, 32}));
    EXPECT_EQ(t[1][2][3][4].item<float>(), 0.75f);
    const auto back = tensor_to_images(t);
    EXPECT_EQ(back[1].pixels, imgs[1].pixels);
}

}  // namespace
}  // namespace vlscc
