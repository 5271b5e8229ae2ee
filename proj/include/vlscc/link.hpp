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

#include "vlscc/channel.hpp"
#include "vlscc/ratequant.hpp"

#include <torch/torch.h>

#include <functional>
#include <span>
#include <vector>

namespace vlscc {

/// One sample as it crosses the link: the shortened symbol payload plus the
/// rate information the receiver needs to put it back in place.
struct SymbolFrame {
    std::vector<double> kept;
    QuantMap quant;       // side-link content; empty for fixed-length links
    int symbols = 0;      // N per location
    int rows = 1;
    int cols = 1;
    int fixed_kept = -1;  // per-location prefix for fixed-length links

    bool fixed_length() const { return fixed_kept >= 0; }
    std::size_t locations() const { return static_cast<std::size_t>(rows) * cols; }
    // Symbols the receiver expects, from the side-link content alone.
    std::size_t expected_kept() const;
    MaskTensor mask() const;
    // Receiver-side zero padding into rows x cols x N (symbol index fastest).
    std::vector<double> padded() const;
};

// Passes each frame's payload through the AWGN link in order.
void transmit(std::span<SymbolFrame> frames, AwgnChannel& channel);

/// Static-shape channel used during training: receives the power-normalized
/// masked symbols and the mask, returns what the decoder sees.
using SymbolChannel = std::function<torch::Tensor(const torch::Tensor& z, const torch::Tensor& mask)>;

SymbolChannel noiseless_channel();

// z + sigma * n * mask, n drawn from `generator`.
SymbolChannel awgn_channel(double snr_db, torch::Generator generator);

/// Per-sample unit-power scaling over kept entries. Both tensors are
/// [B, ...]; samples without kept symbols pass through.
torch::Tensor normalize_power(const torch::Tensor& y, const torch::Tensor& mask);

}  // namespace vlscc
