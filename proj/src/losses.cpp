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

#include "vlscc/losses.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <stdexcept>

namespace vlscc {

void LossWeights::validate() const
{
    if (!(gamma >= 0.0) || !(lambda >= 0.0))
        throw std::invalid_argument("loss weights must be non-negative");
}

torch::Tensor rate_loss_1d(const torch::Tensor& rate) { return rate.mean(); }

torch::Tensor rate_loss_2d(const torch::Tensor& rate_map)
{
    if (rate_map.dim() < 2)
        throw std::invalid_argument("rate map must have spatial dimensions");
    return rate_map.reshape({rate_map.size(0), -1}).sum(1).mean();
}

torch::Tensor l2_distortion(const torch::Tensor& x, const torch::Tensor& y)
{
    if (x.sizes() != y.sizes())
        throw std::invalid_argument("l2_distortion: shape mismatch");
    return (x - y).pow(2).mean();
}

torch::Tensor feature_distance(const std::vector<torch::Tensor>& fx, const std::vector<torch::Tensor>& fy,
                               const std::vector<torch::Tensor>& channel_weights)
{
    if (fx.size() != fy.size() || fx.empty())
        throw std::invalid_argument("feature stacks must be non-empty and of equal depth");
    if (!channel_weights.empty() && channel_weights.size() != fx.size())
        throw std::invalid_argument("one weight vector per layer expected");
    torch::Tensor total;
    for (std::size_t l = 0; l < fx.size(); ++l) {
        if (fx[l].sizes() != fy[l].sizes() || fx[l].dim() != 4)
            throw std::invalid_argument("feature maps must be [B, C, H, W] and match");
        auto diff = fx[l] - fy[l];
        if (!channel_weights.empty() && channel_weights[l].defined())
            diff = diff * channel_weights[l].to(diff.dtype()).view({1, -1, 1, 1});
        const double hw = static_cast<double>(fx[l].size(2) * fx[l].size(3));
        auto term = diff.pow(2).sum({1, 2, 3}) / hw;  // [B]
        total = total.defined() ? total + term : term;
    }
    return total.mean();
}

PerceptualExtractorImpl::PerceptualExtractorImpl(PerceptualExtractorSpec spec) : spec_(std::move(spec))
{
    if (spec_.channels.size() != spec_.strides.size() || spec_.channels.empty())
        throw std::invalid_argument("extractor needs one stride per stage");
    auto gen = at::make_generator<at::CPUGeneratorImpl>(spec_.seed);
    int64_t in = 3;
    for (std::size_t s = 0; s < spec_.channels.size(); ++s) {
        torch::nn::Conv2d conv(torch::nn::Conv2dOptions(in, spec_.channels[s], 3)
                                   .stride(spec_.strides[s])
                                   .padding(1));
        torch::NoGradGuard guard;
        const double std = std::sqrt(2.0 / static_cast<double>(in * 9));
        conv->weight.normal_(0.0, std, gen);
        conv->bias.zero_();
        conv->weight.set_requires_grad(false);
        conv->bias.set_requires_grad(false);
        stages_->push_back(conv);
        in = spec_.channels[s];
    }
    register_module("stages", stages_);
}

std::vector<torch::Tensor> PerceptualExtractorImpl::features(const torch::Tensor& images)
{
    std::vector<torch::Tensor> out;
    auto h = images;
    for (const auto& stage : *stages_) {
        h = torch::relu(stage->as<torch::nn::Conv2d>()->forward(h));
        out.push_back(h);
    }
    return out;
}

torch::Tensor perceptual_distance(PerceptualExtractor& extractor, const torch::Tensor& x, const torch::Tensor& y)
{
    if (x.sizes() != y.sizes())
        throw std::invalid_argument("perceptual_distance: shape mismatch");
    return feature_distance(extractor->features(x), extractor->features(y), extractor->spec().layer_weights);
}

torch::Tensor lsgan_discriminator_loss(const torch::Tensor& d_real, const torch::Tensor& d_fake)
{
    if (d_real.numel() == 0 || d_fake.numel() == 0)
        throw std::invalid_argument("discriminator batches must be non-empty");
    return (d_real - 1.0).pow(2).mean() + d_fake.pow(2).mean();
}

torch::Tensor lsgan_generator_loss(const torch::Tensor& d_fake)
{
    if (d_fake.numel() == 0)
        throw std::invalid_argument("discriminator batch must be non-empty");
    return (d_fake - 1.0).pow(2).mean();
}

torch::Tensor total_loss(const torch::Tensor& fidelity, const torch::Tensor& semantic, const torch::Tensor& rate,
                         const LossWeights& weights)
{
    weights.validate();
    auto loss = fidelity;
    if (semantic.defined())
        loss = loss + weights.lambda * semantic;
    if (rate.defined())
        loss = loss + weights.gamma * rate;
    return loss;
}

double total_loss(double fidelity, double semantic, double rate, const LossWeights& weights)
{
    weights.validate();
    return fidelity + weights.lambda * semantic + weights.gamma * rate;
}

}  // namespace vlscc
