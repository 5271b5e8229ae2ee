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

#include "vlscc/ratequant.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vlscc {

struct ChannelConfig {
    double snr_db = 10.0;     // per real symbol, against unit average signal power
    std::uint64_t seed = 0;
};

/// sigma^2 = 10^(-snr_db / 10).
double noise_variance(double snr_db);

// Stream derivation shared by every seeded generator in the library.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct NormalizedSymbols {
    std::vector<double> symbols;
    double scale = 1.0;
    bool degenerate = false;  // no kept symbols; input returned unchanged
};

/// Scales kept symbols to unit mean square. Masked positions are zeroed.
NormalizedSymbols normalize_power(std::span<const double> y, std::span<const std::uint8_t> mask);

// Unit-power scaling for an already shortened vector.
NormalizedSymbols normalize_power(std::span<const double> kept);

/// z + n with n ~ N(0, noise_variance(snr_db)) i.i.d. The noise stream is a
/// pure function of (cfg.seed, stream).
std::vector<double> awgn(std::span<const double> z, const ChannelConfig& cfg,
                         std::uint64_t stream = 0);

// Noise samples alone; awgn(z) == z + awgn_noise(z.size()).
std::vector<double> awgn_noise(std::size_t count, const ChannelConfig& cfg,
                               std::uint64_t stream = 0);

/// Seeded AWGN link that advances its stream on every transmission, so
/// consecutive frames see independent noise and two links built from the
/// same config replay identically.
class AwgnChannel {
public:
    explicit AwgnChannel(ChannelConfig cfg) : cfg_(cfg) {}

    std::vector<double> transmit(std::span<const double> z) { return awgn(z, cfg_, calls_++); }

    const ChannelConfig& config() const { return cfg_; }
    std::uint64_t calls() const { return calls_; }

private:
    ChannelConfig cfg_;
    std::uint64_t calls_ = 0;
};

/// Receiver-side restoration of a shortened vector frame: the received
/// symbols occupy the prefix implied by q, the rest is zero.
std::vector<double> zero_pad(std::span<const double> received, int q, int symbols, int levels);

// Same with a known prefix length, for fixed-length links.
std::vector<double> zero_pad_prefix(std::span<const double> received, int kept, int symbols);

/// 2D restoration into a rows x cols x N tensor (symbol index fastest);
/// received symbols are consumed in row-major location order, each filling
/// the prefix of its fiber.
std::vector<double> zero_pad(std::span<const double> received, const QuantMap& quant, int symbols);

/// Fixed-length side-link cost of a quant map: (H/16)(W/16)log2(L) / (HW).
double sidelink_bpp(int height, int width, int levels);

}  // namespace vlscc
