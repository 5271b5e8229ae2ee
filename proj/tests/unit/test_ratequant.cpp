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
#include "vlscc/ratequant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace vlscc {
namespace {

TEST(Quantize, WorkedExamples)
{
    EXPECT_EQ(quantize(0.3, 5), 1);
    EXPECT_EQ(quantize(0.007, 64), 0);
    EXPECT_EQ(quantize(0.5, 64), 31);  // 31.5 sits on a boundary, lower level wins
}

TEST(Quantize, RejectsOutOfRange)
{
    EXPECT_THROW(quantize(0.0, 8), std::invalid_argument);
    EXPECT_THROW(quantize(1.0, 8), std::invalid_argument);
    EXPECT_THROW(quantize(0.5, 1), std::invalid_argument);
    EXPECT_EQ(quantize_clamped(1.0, 8), 7);
    EXPECT_EQ(quantize_clamped(-0.2, 8), 0);
}

TEST(Quantize, MatchesIntervalAndNearestLevelOracles)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> lv(2, 64);
    for (int k = 0; k < 20000; ++k) {
        const double r = unit(rng);
        if (r <= 0.0)
            continue;
        const int levels = lv(rng);
        const int q = quantize(r, levels);
        ASSERT_EQ(q, oracle::quantize(r, levels)) << r << " L=" << levels;
        ASSERT_EQ(q, oracle::nearest_level(r, levels)) << r << " L=" << levels;
        ASSERT_LE(std::abs(static_cast<double>(q) / (levels - 1) - r), 0.5 / (levels - 1) + 1e-15);
    }
}

TEST(Quantize, BoundariesGoDown)
{
    for (int levels = 2; levels <= 64; ++levels) {
        for (int l = 0; l + 1 < levels; ++l) {
            const double r = (l + 0.5) / (levels - 1);
            if (r <= 0.0 || r >= 1.0)
                continue;
            EXPECT_EQ(quantize(r, levels), oracle::quantize(r, levels));
        }
    }
}

TEST(QuantizeBackward, ScalesByLevelsMinusOne)
{
    EXPECT_EQ(quantize_backward(1.0, 5), 4.0);
    EXPECT_EQ(quantize_backward(0.0, 64), 0.0);
    EXPECT_EQ(quantize_backward(-0.5, 3), -1.0);
}

TEST(Mask, WorkedExamples)
{
    EXPECT_EQ(make_mask(0, 8, 5), RateMask(8, 0));
    EXPECT_EQ(make_mask(4, 8, 5), RateMask(8, 1));
    EXPECT_EQ(make_mask(1, 10, 4), (RateMask{1, 1, 1, 1, 0, 0, 0, 0, 0, 0}));
}

TEST(Mask, ExhaustiveAgainstLiteralDefinition)
{
    for (int levels = 2; levels <= 16; ++levels) {
        for (int n = 1; n <= 32; ++n) {
            RateMask previous(static_cast<std::size_t>(n), 0);
            for (int q = 0; q < levels; ++q) {
                const RateMask m = make_mask(q, n, levels);
                ASSERT_EQ(m, oracle::mask(q, n, levels)) << "q=" << q << " N=" << n << " L=" << levels;
                int ones = 0;
                for (int i = 0; i < n; ++i) {
                    ones += m[i];
                    if (i > 0) {
                        ASSERT_LE(m[i], m[i - 1]);  // prefix
                    }
                    ASSERT_LE(previous[i], m[i]);   // monotone in q
                }
                ASSERT_EQ(ones, mask_popcount(q, n, levels));
                ASSERT_EQ(ones, static_cast<int>(std::ceil(static_cast<double>(n) * q / (levels - 1))));
                previous = m;
            }
        }
    }
}

TEST(MaskBackward, WorkedExamples)
{
    EXPECT_DOUBLE_EQ(mask_gradient_weight(3, 2, 8, 5), 1.0 / 3.0);
    EXPECT_EQ(mask_gradient_weight(7, 2, 8, 5), 0.0);
    const std::vector<double> zeros(8, 0.0);
    EXPECT_EQ(mask_backward(zeros, 2, 8, 5), 0.0);
}

TEST(MaskBackward, ExhaustiveWindow)
{
    for (int levels = 2; levels <= 16; ++levels) {
        for (int n = 1; n <= 32; ++n) {
            const std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
            for (int q = 0; q < levels; ++q) {
                int inside = 0;
                for (int i = 0; i < n; ++i) {
                    const double w = mask_gradient_weight(i, q, n, levels);
                    ASSERT_EQ(w, oracle::mask_weight(i, q, n, levels));
                    ASSERT_TRUE(w == 0.0 || w == 1.0 / 3.0);
                    if (w != 0.0) {
                        ++inside;
                        // Support stays within the 3-level window mapped to symbol positions.
                        const double centre = static_cast<double>(n) * q / (levels - 1);
                        ASSERT_LE(std::abs(i - centre), 3.0 * n / (levels - 1) + 1.0);
                    }
                }
                ASSERT_DOUBLE_EQ(mask_backward(ones, q, n, levels), inside / 3.0);
            }
        }
    }
}

TEST(MaskTensor, FibersFollowQuantMap)
{
    const auto zero = make_mask_tensor(QuantMap(1, 1, 5, {0}), 4);
    EXPECT_EQ(std::vector<std::uint8_t>(zero.fiber(0, 0).begin(), zero.fiber(0, 0).end()),
              (std::vector<std::uint8_t>{0, 0, 0, 0}));
    const auto full = make_mask_tensor(QuantMap(1, 1, 5, {4}), 4);
    EXPECT_EQ(full.popcount(), 4u);

    const auto m = make_mask_tensor(QuantMap(1, 2, 5, {1, 3}), 4);
    EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{1, 0, 0, 0, 1, 1, 1, 0}));
    EXPECT_EQ(kept_symbols(QuantMap(1, 2, 5, {1, 3}), 4), 4u);
}

TEST(QuantMap, RejectsBadValues)
{
    EXPECT_THROW(QuantMap(1, 2, 5, {1}), std::invalid_argument);
    EXPECT_THROW(QuantMap(1, 1, 5, {5}), std::invalid_argument);
    EXPECT_THROW(QuantMap(1, 1, 5, {-1}), std::invalid_argument);
}

}  // namespace
}  // namespace vlscc
