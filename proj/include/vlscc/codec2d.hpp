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

#include "vlscc/image.hpp"
#include "vlscc/link.hpp"

#include <torch/torch.h>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vlscc {

/// Kept entries of a rows x cols x N tensor (symbol index fastest), in
/// row-major location order and then symbol order.
std::vector<double> gather_kept(std::span<const double> symbols, const MaskTensor& mask);

/// Inverse placement of gather_kept for the mask implied by `quant`; zeros
/// elsewhere.
std::vector<double> scatter_padded(std::span<const double> received, const QuantMap& quant, int symbols);

// Images <-> NCHW float tensors.
torch::Tensor images_to_tensor(std::span<const Image> images);
std::vector<Image> tensor_to_images(const torch::Tensor& batch);

struct Codec2dConfig {
    int feature_channels = 256;  // C1, semantic encoder width
    int sce_channels = 512;      // hidden width of the channel encoder / decoder
    int symbols = 512;           // N, symbol depth per location
    int rate_channels = 128;     // hidden width of the rate network
    int levels = 64;             // L
    std::uint64_t seed = 0;
    std::optional<int> fixed_symbols;

    void validate() const;
    bool fixed_length() const { return fixed_symbols.has_value(); }
};

struct Forward2d {
    torch::Tensor reconstruction;  // [B, 3, H, W]
    torch::Tensor features;        // X   [B, C1, H/4, W/4]
    torch::Tensor features_hat;    // X^  [B, C1, H/4, W/4]
    torch::Tensor rate_map;        // R   [B, H/16, W/16], undefined for fixed-length
    torch::Tensor quant;           // Q   [B, H/16, W/16], undefined for fixed-length
    torch::Tensor mask;            // M   [B, N, H/16, W/16]
    torch::Tensor symbols;         // Y   [B, N, H/16, W/16]
    torch::Tensor received;        // P   [B, N, H/16, W/16]
};

/// Spatially-variant codec for images. Tensors are NCHW; the H/16 x W/16
/// rate map controls a per-location prefix of the N symbol channels.
///
/// Semantic encoder: 9x9/2 -> C1, PReLU, 5x5/2 -> C1, PReLU, 5x5/1 -> C1.
/// Rate network:     5x5/1, 5x5/1, 5x5/2 (PReLU, width Cr), 3x3/2 -> 1, sigmoid.
/// Channel encoder:  [X, up(R)] 5x5/2 -> Cs, PReLU, 5x5/1 -> Cs, PReLU,
///                   5x5/1 -> Cs, 3x3/2 -> N.
/// Decoders mirror these with transposed convolutions; the channel decoder
/// takes Q / (L-1) as an extra input plane.
class Codec2dImpl : public torch::nn::Module {
public:
    explicit Codec2dImpl(Codec2dConfig cfg);

    torch::Tensor semantic_encode(const torch::Tensor& images);
    torch::Tensor rate_map(const torch::Tensor& features);
    torch::Tensor encode_symbols(const torch::Tensor& features, const torch::Tensor& rate_map);
    torch::Tensor reconstruct_features(const torch::Tensor& padded, const torch::Tensor& quant);
    // Output clamped to [0, 1].
    torch::Tensor semantic_decode(const torch::Tensor& features);

    // A defined rate_override [B, H/16, W/16] replaces the rate map and
    // carries no gradient. A defined rate_offset of the same shape is added
    // to the rate map, clamped to [0, 1], before quantization; the returned
    // map is the one without it.
    Forward2d forward(const torch::Tensor& images, const SymbolChannel& channel,
                      const torch::Tensor& rate_override = {}, const torch::Tensor& rate_offset = {});

    std::vector<SymbolFrame> encode(const torch::Tensor& images);
    torch::Tensor decode(std::span<const SymbolFrame> frames);

    const Codec2dConfig& config() const { return cfg_; }

private:
    void check_images(const torch::Tensor& images) const;
    torch::Tensor fixed_mask(int64_t batch, int64_t rows, int64_t cols, const torch::TensorOptions& opts) const;

    Codec2dConfig cfg_;
    torch::nn::Sequential encoder_{nullptr};
    torch::nn::Sequential ran_{nullptr};
    torch::nn::Sequential sce_{nullptr};
    torch::nn::Sequential scd_{nullptr};
    torch::nn::Sequential decoder_{nullptr};
};
TORCH_MODULE(Codec2d);

}  // namespace vlscc
