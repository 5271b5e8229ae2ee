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

#include <torch/torch.h>

#include <cstdint>
#include <vector>

namespace vlscc {

struct LossWeights {
    double gamma = 0.0;   // rate
    double lambda = 0.0;  // semantic / perceptual

    void validate() const;
};

// Rate loss for a batch of scalar rate indices [B]: the rate itself, batch-averaged.
torch::Tensor rate_loss_1d(const torch::Tensor& rate);

// Rate loss for rate maps [B, H, W] or [B, 1, H, W]: sum over the map, batch-averaged.
torch::Tensor rate_loss_2d(const torch::Tensor& rate_map);

// Mean squared error over all elements.
torch::Tensor l2_distortion(const torch::Tensor& x, const torch::Tensor& y);

/// Feature-space distance
///
///     d(x, y) = sum_l 1/(H_l W_l) sum_{h,w} || w_l * (F_x^l - F_y^l)_{hw} ||^2
///
/// over per-layer feature maps [B, C_l, H_l, W_l], averaged over the batch.
/// `channel_weights[l]` is a [C_l] tensor; an undefined tensor means all ones.
torch::Tensor feature_distance(const std::vector<torch::Tensor>& fx,
                               const std::vector<torch::Tensor>& fy,
                               const std::vector<torch::Tensor>& channel_weights = {});

struct PerceptualExtractorSpec {
    std::vector<int64_t> channels{16, 32, 64};  // one conv stage per entry
    std::vector<int64_t> strides{1, 2, 2};
    std::uint64_t seed = 0x5eed;
    // Optional per-layer channel weights; empty means w_l = 1.
    std::vector<torch::Tensor> layer_weights;
};

/// Fixed random convolutional pyramid standing in for a pretrained feature
/// network. Parameters never receive gradients.
class PerceptualExtractorImpl : public torch::nn::Module {
public:
    explicit PerceptualExtractorImpl(PerceptualExtractorSpec spec = {});

    // Features after every stage; images [B, 3, H, W].
    std::vector<torch::Tensor> features(const torch::Tensor& images);

    const PerceptualExtractorSpec& spec() const { return spec_; }

private:
    PerceptualExtractorSpec spec_;
    torch::nn::ModuleList stages_;
};
TORCH_MODULE(PerceptualExtractor);

torch::Tensor perceptual_distance(PerceptualExtractor& extractor, const torch::Tensor& x,
                                  const torch::Tensor& y);

// mean((d_real - 1)^2) + mean(d_fake^2)
torch::Tensor lsgan_discriminator_loss(const torch::Tensor& d_real, const torch::Tensor& d_fake);

// mean((d_fake - 1)^2)
torch::Tensor lsgan_generator_loss(const torch::Tensor& d_fake);

/// fidelity + lambda * semantic + gamma * rate. Serves both the pose-style
/// objective (semantic = adversarial term) and the image objective
/// (semantic = perceptual term).
torch::Tensor total_loss(const torch::Tensor& fidelity, const torch::Tensor& semantic,
                         const torch::Tensor& rate, const LossWeights& weights);
double total_loss(double fidelity, double semantic, double rate, const LossWeights& weights);

}  // namespace vlscc
