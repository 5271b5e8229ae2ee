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

#include "support/oracles.hpp"
#include "vlscc/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace vlscc {
namespace {

TEST(Psnr, IdenticalIsInfinite)
{
    const std::vector<float> x{0.1f, 0.5f, 0.9f};
    EXPECT_EQ(psnr(x, x), std::numeric_limits<double>::infinity());
}

TEST(Psnr, KnownValue)
{
    // MSE 0.01 -> 20 dB.
    const std::vector<float> x(4, 0.5f), y(4, 0.6f);
    EXPECT_NEAR(psnr(x, y), 20.0, 1e-5);
    EXPECT_NEAR(psnr_from_mse(1e-3), 30.0, 1e-12);
}

TEST(Psnr, MatchesLiteralFormula)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (int k = 0; k < 50; ++k) {
        std::vector<float> x(300), y(300);
        std::vector<double> xd(300), yd(300);
        for (int i = 0; i < 300; ++i) {
            x[i] = u(rng);
            y[i] = u(rng);
            xd[i] = x[i];
            yd[i] = y[i];
        }
        EXPECT_NEAR(psnr(x, y), oracle::psnr(xd, yd), 1e-10);
        EXPECT_NEAR(mean_squared_error(x, y), oracle::mse(xd, yd), 1e-10);
    }
}

TEST(Mpjpe, WorkedExamples)
{
    const std::vector<JointSet> a{{{0, 0, 0}}};
    EXPECT_EQ(mpjpe(a, a), 0.0);
    const std::vector<JointSet> b{{{1, 0, 0}}};
    EXPECT_DOUBLE_EQ(mpjpe(a, b), 1.0);
    const std::vector<JointSet> two{{{0, 0, 0}, {0, 0, 0}}};
    const std::vector<JointSet> off{{{3, 4, 0}, {0, 0, 0}}};
    EXPECT_DOUBLE_EQ(mpjpe(two, off), 2.5);
}

TEST(Mpjpe, MatchesLiteralFormula)
{
    std::mt19937_64 rng(22);
    std::normal_distribution<double> n(0.0, 1.0);
    const int samples = 7, joints = 13;
    std::vector<JointSet> a(samples), b(samples);
    std::vector<double> fa, fb;
    for (int s = 0; s < samples; ++s) {
        for (int j = 0; j < joints; ++j) {
            Joint p{n(rng), n(rng), n(rng)}, q{n(rng), n(rng), n(rng)};
            a[s].push_back(p);
            b[s].push_back(q);
            fa.insert(fa.end(), p.begin(), p.end());
            fb.insert(fb.end(), q.begin(), q.end());
        }
    }
    EXPECT_NEAR(mpjpe(a, b), oracle::mpjpe(fa, fb, samples * joints), 1e-10);
}

TEST(Mpjpe, ShapeMismatchThrows)
{
    const std::vector<JointSet> a{{{0, 0, 0}}}, b{{{0, 0, 0}, {1, 1, 1}}};
    EXPECT_THROW(mpjpe(a, b), std::invalid_argument);
}

TEST(AsJoints, GroupsTriples)
{
    const std::vector<float> flat{1, 2, 3, 4, 5, 6};
    const auto joints = as_joints(flat);
    ASSERT_EQ(joints.size(), 2u);
    EXPECT_EQ(joints[1][2], 6.0);
    EXPECT_THROW(as_joints(std::vector<float>{1, 2}), std::invalid_argument);
}

TEST(Spp, Examples)
{
    EXPECT_NEAR(spp(2000, 224, 224), 1000.0 / 50176.0, 1e-15);
    EXPECT_NEAR(spp(2000, 224, 224), 0.019930, 5e-7);
    EXPECT_EQ(spp(0, 64, 64), 0.0);
    EXPECT_DOUBLE_EQ(spp(500, 64, 64), 4.0 * spp(500, 128, 128));
}

TEST(MaskDensity, MatchesKeptFraction)
{
    const std::vector<QuantMap> frames{QuantMap(1, 2, 5, {1, 3}), QuantMap(1, 2, 5, {4, 0})};
    // kept 1+3 and 4+0 of 8 each.
    EXPECT_DOUBLE_EQ(mask_density(frames, 4), 0.5);
    EXPECT_THROW(mask_density(std::span<const QuantMap>{}, 4), std::invalid_argument);
}

TEST(Spp, AgreesWithDensityAccounting)
{
    // spp = density * N * H2 * W2 / (2 H W).
    const int h = 64, w = 64, n = 32;
    const std::vector<QuantMap> frames{QuantMap(4, 4, 8, std::vector<int>(16, 3))};
    const double kept = static_cast<double>(kept_symbols(frames[0], n));
    EXPECT_DOUBLE_EQ(spp(kept, h, w), mask_density(frames, n) * n * 16 / (2.0 * h * w));
}

}  // namespace
}  // namespace vlscc
