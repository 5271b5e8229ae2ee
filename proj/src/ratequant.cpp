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

#include "vlscc/ratequant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vlscc {

namespace {

void check_level(int q, int levels)
{
    if (q < 0 || q > levels - 1)
        throw std::invalid_argument("quant level " + std::to_string(q) + " outside [0, " +
                                    std::to_string(levels - 1) + "]");
}

void check_symbols(int symbols)
{
    if (symbols < 1)
        throw std::invalid_argument("symbol count must be >= 1");
}

// ceil(a / b) for a >= 0, b > 0
std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

QuantMap::QuantMap(int rows, int cols, int levels)
    : QuantMap(rows, cols, levels, std::vector<int>(static_cast<std::size_t>(rows) * cols, 0))
{
}

QuantMap::QuantMap(int rows, int cols, int levels, std::vector<int> values)
    : rows(rows), cols(cols), levels(levels), values(std::move(values))
{
    check_levels(levels);
    if (rows < 0 || cols < 0 || this->values.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("quant map shape does not match its value count");
    for (int v : this->values)
        check_level(v, levels);
}

std::size_t MaskTensor::popcount() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

void check_levels(int levels)
{
    if (levels < 2)
        throw std::invalid_argument("level count must be >= 2, got " + std::to_string(levels));
}

int quantize_clamped(double r, int levels)
{
    // ceil(t - 0.5) rounds to nearest with exact halves going down. The
    // product is rounded, so the candidate is settled against the exact
    // value of r (L-1) - (l +- 0.5), whose sign fma() preserves.
    const double scale = static_cast<double>(levels - 1);
    double l = std::clamp(std::ceil(r * scale - 0.5), 0.0, scale);
    while (l > 0.0 && std::fma(r, scale, -(l - 0.5)) <= 0.0)
        l -= 1.0;
    while (l < scale && std::fma(r, scale, -(l + 0.5)) > 0.0)
        l += 1.0;
    return static_cast<int>(l);
}

int quantize(double r, int levels)
{
    check_levels(levels);
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("rate index must lie in (0, 1), got " + std::to_string(r));
    return quantize_clamped(r, levels);
}

double quantize_backward(double upstream, int levels)
{
    check_levels(levels);
    return upstream * static_cast<double>(levels - 1);
}

int mask_popcount(int q, int symbols, int levels)
{
    check_levels(levels);
    check_symbols(symbols);
    check_level(q, levels);
    return static_cast<int>(ceil_div(static_cast<std::int64_t>(symbols) * q, levels - 1));
}

RateMask make_mask(int q, int symbols, int levels)
{
    const int ones = mask_popcount(q, symbols, levels);
    RateMask mask(static_cast<std::size_t>(symbols), 0);
    std::fill_n(mask.begin(), ones, std::uint8_t{1});
    return mask;
}

double mask_gradient_weight(int i, int q, int symbols, int levels)
{
    // c = ceil((L-1) i / N)
    const auto c = ceil_div(static_cast<std::int64_t>(levels - 1) * i, symbols);
    return (c - 2 < q && q <= c + 1) ? 1.0 / 3.0 : 0.0;
}

double mask_backward(std::span<const double> upstream, int q, int symbols, int levels)
{
    check_levels(levels);
    check_symbols(symbols);
    if (upstream.size() != static_cast<std::size_t>(symbols))
        throw std::invalid_argument("mask gradient length does not match symbol count");
    double acc = 0.0;
    for (int i = 0; i < symbols; ++i) {
        const double w = mask_gradient_weight(i, q, symbols, levels);
        if (w != 0.0)
            acc += upstream[static_cast<std::size_t>(i)] * w;
    }
    return acc;
}

MaskTensor make_mask_tensor(const QuantMap& quant, int symbols)
{
    check_symbols(symbols);
    if (quant.values.size() != static_cast<std::size_t>(quant.rows) * quant.cols)
        throw std::invalid_argument("quant map shape mismatch");
    MaskTensor m{quant.rows, quant.cols, symbols, {}};
    m.bits.reserve(quant.values.size() * static_cast<std::size_t>(symbols));
    for (int q : quant.values) {
        const RateMask fiber = make_mask(q, symbols, quant.levels);
        m.bits.insert(m.bits.end(), fiber.begin(), fiber.end());
    }
    return m;
}

std::size_t kept_symbols(const QuantMap& quant, int symbols)
{
    std::size_t total = 0;
    for (int q : quant.values)
        total += static_cast<std::size_t>(mask_popcount(q, symbols, quant.levels));
    return total;
}

}  // namespace vlscc
