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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vlscc {

// Binary prefix mask over N symbol slots. 1 = transmitted.
using RateMask = std::vector<std::uint8_t>;

// Quantized rate levels on a rows x cols grid. A vector source is the 1x1 case.
struct QuantMap {
    int rows = 0;
    int cols = 0;
    int levels = 2;
    std::vector<int> values;  // row-major

    QuantMap() = default;
    QuantMap(int rows, int cols, int levels);
    QuantMap(int rows, int cols, int levels, std::vector<int> values);

    static QuantMap scalar(int level, int levels) { return QuantMap(1, 1, levels, {level}); }

    int& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
    int at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    friend bool operator==(const QuantMap&, const QuantMap&) = default;
};

// rows x cols x symbols bits, symbol index fastest.
struct MaskTensor {
    int rows = 0;
    int cols = 0;
    int symbols = 0;
    std::vector<std::uint8_t> bits;

    std::uint8_t at(int i, int j, int n) const
    {
        return bits[(static_cast<std::size_t>(i) * cols + j) * symbols + n];
    }
    std::span<const std::uint8_t> fiber(int i, int j) const
    {
        return {bits.data() + (static_cast<std::size_t>(i) * cols + j) * symbols,
                static_cast<std::size_t>(symbols)};
    }
    std::size_t popcount() const;
};

void check_levels(int levels);

/// Uniform L-level quantizer: the level l with (l-0.5)/(L-1) <= r <= (l+0.5)/(L-1).
/// Half-way values go to the lower level. Throws std::invalid_argument unless
/// 0 < r < 1 and L >= 2.
int quantize(double r, int levels);

// Same rule without the range check; the result is clamped to [0, L-1].
// Used on the training path where a float sigmoid may saturate to 0 or 1.
int quantize_clamped(double r, int levels);

// Straight-through rule for the quantizer: dq/dr is taken to be L-1.
double quantize_backward(double upstream, int levels);

/// Number of ones in the mask generated by level q: ceil(N*q/(L-1)).
int mask_popcount(int q, int symbols, int levels);

/// Prefix mask: bit i is set iff i < N*q/(L-1). Evaluated in integers.
RateMask make_mask(int q, int symbols, int levels);

/// Surrogate derivative of mask bit i with respect to q: 1/3 when
/// ceil((L-1)i/N) - 2 < q <= ceil((L-1)i/N) + 1, else 0. The window is not
/// renormalized where it leaves [0, L-1].
double mask_gradient_weight(int i, int q, int symbols, int levels);

// Chain rule through the mask: sum_i upstream[i] * mask_gradient_weight(i, ...).
double mask_backward(std::span<const double> upstream, int q, int symbols, int levels);

MaskTensor make_mask_tensor(const QuantMap& quant, int symbols);

// Total kept symbols implied by a quant map; the receiver-side accounting.
std::size_t kept_symbols(const QuantMap& quant, int symbols);

}  // namespace vlscc
