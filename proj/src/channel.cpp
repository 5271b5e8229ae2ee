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

#include "vlscc/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vlscc {

double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

NormalizedSymbols normalize_power(std::span<const double> y, std::span<const std::uint8_t> mask)
{
    if (y.size() != mask.size())
        throw std::invalid_argument("symbol and mask lengths differ");
    NormalizedSymbols out;
    out.symbols.assign(y.begin(), y.end());
    double energy = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (mask[i]) {
            energy += y[i] * y[i];
            ++kept;
        }
    }
    if (kept == 0) {
        out.degenerate = true;
        return out;
    }
    out.scale = energy > 0.0 ? std::sqrt(static_cast<double>(kept) / energy) : 1.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        out.symbols[i] = mask[i] ? y[i] * out.scale : 0.0;
    return out;
}

NormalizedSymbols normalize_power(std::span<const double> kept)
{
    const std::vector<std::uint8_t> ones(kept.size(), 1);
    return normalize_power(kept, ones);
}

std::vector<double> awgn_noise(std::size_t count, const ChannelConfig& cfg, std::uint64_t stream)
{
    std::mt19937_64 rng(mix_seed(cfg.seed, stream));
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_variance(cfg.snr_db)));
    std::vector<double> n(count);
    for (auto& v : n)
        v = gauss(rng);
    return n;
}

std::vector<double> awgn(std::span<const double> z, const ChannelConfig& cfg, std::uint64_t stream)
{
    std::vector<double> out = awgn_noise(z.size(), cfg, stream);
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] += z[i];
    return out;
}

std::vector<double> zero_pad_prefix(std::span<const double> received, int kept, int symbols)
{
    if (kept < 0 || kept > symbols || received.size() != static_cast<std::size_t>(kept))
        throw std::invalid_argument("received " + std::to_string(received.size()) +
                                    " symbols, expected " + std::to_string(kept));
    std::vector<double> out(static_cast<std::size_t>(symbols), 0.0);
    std::copy(received.begin(), received.end(), out.begin());
    return out;
}

std::vector<double> zero_pad(std::span<const double> received, int q, int symbols, int levels)
{
    return zero_pad_prefix(received, mask_popcount(q, symbols, levels), symbols);
}

std::vector<double> zero_pad(std::span<const double> received, const QuantMap& quant, int symbols)
{
    const std::size_t expected = kept_symbols(quant, symbols);
    if (received.size() != expected)
        throw std::invalid_argument("received " + std::to_string(received.size()) +
                                    " symbols, quant map implies " + std::to_string(expected));
    std::vector<double> out(quant.values.size() * static_cast<std::size_t>(symbols), 0.0);
    std::size_t cursor = 0;
    for (std::size_t loc = 0; loc < quant.values.size(); ++loc) {
        const auto n = static_cast<std::size_t>(mask_popcount(quant.values[loc], symbols, quant.levels));
        std::copy_n(received.begin() + static_cast<std::ptrdiff_t>(cursor), n,
                    out.begin() + static_cast<std::ptrdiff_t>(loc * static_cast<std::size_t>(symbols)));
        cursor += n;
    }
    return out;
}

double sidelink_bpp(int height, int width, int levels)
{
    check_levels(levels);
    if (height <= 0 || width <= 0 || height % 16 != 0 || width % 16 != 0)
        throw std::invalid_argument("image dimensions must be positive multiples of 16");
    const double locations = static_cast<double>(height / 16) * static_cast<double>(width / 16);
    return locations * std::log2(static_cast<double>(levels)) /
           (static_cast<double>(height) * static_cast<double>(width));
}

}  // namespace vlscc
