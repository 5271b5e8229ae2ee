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

#include "vlscc/link.hpp"

#include <torch/torch.h>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vlscc {

struct Codec1dConfig {
    int dim = 85;         // D
    int symbols = 4000;   // N, real symbols
    int levels = 8;       // L
    int hidden = 1024;
    int encoder_layers = 6;
    int decoder_layers = 6;
    int rate_layers = 4;
    std::uint64_t seed = 0;
    // Set for the fixed-length baseline: no rate network, constant prefix.
    std::optional<int> fixed_symbols;

    void validate() const;
    bool fixed_length() const { return fixed_symbols.has_value(); }
};

struct Forward1d {
    torch::Tensor reconstruction;  // [B, D]
    torch::Tensor rate;            // [B], undefined for fixed-length
    torch::Tensor quant;           // [B] integer levels as floats, undefined for fixed-length
    torch::Tensor mask;            // [B, N]
    torch::Tensor symbols;         // [B, N] encoder output before masking
    torch::Tensor received;        // [B, N] decoder input after the channel
};

/// Variable-length semantic-channel codec for vector sources.
///
/// Training runs the static-shape path in forward(): the prefix mask is
/// multiplied into the symbols and the quantizer/mask surrogate gradients
/// carry the distortion signal back into the rate network. encode() and
/// decode() run the transmission path with physically shortened frames.
class Codec1dImpl : public torch::nn::Module {
public:
    explicit Codec1dImpl(Codec1dConfig cfg);

    torch::Tensor rate(const torch::Tensor& x);
    // r is appended to x as an extra input feature.
    torch::Tensor encode_symbols(const torch::Tensor& x, const torch::Tensor& r);
    // q / (L-1) is appended to the padded symbols.
    torch::Tensor reconstruct(const torch::Tensor& padded, const torch::Tensor& quant);

    // A defined rate_override [B] replaces the rate network's output and
    // carries no gradient. A defined rate_offset of the same shape is added
    // to the rate, clamped to [0, 1], before quantization; the returned rate
    // is the one without it.
    Forward1d forward(const torch::Tensor& x, const SymbolChannel& channel,
                      const torch::Tensor& rate_override = {}, const torch::Tensor& rate_offset = {});

    std::vector<SymbolFrame> encode(const torch::Tensor& x);
    torch::Tensor decode(std::span<const SymbolFrame> frames);

    const Codec1dConfig& config() const { return cfg_; }

private:
    void check_input(const torch::Tensor& x) const;
    torch::Tensor fixed_mask(int64_t batch, const torch::TensorOptions& opts) const;

    Codec1dConfig cfg_;
    torch::nn::Sequential ran_{nullptr};
    torch::nn::Sequential sce_{nullptr};
    torch::nn::Sequential scd_{nullptr};
};
TORCH_MODULE(Codec1d);

}  // namespace vlscc
