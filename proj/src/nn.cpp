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

#include "vlscc/nn.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlscc {

namespace {

void init_layer(torch::nn::Module& layer, at::Generator& gen)
{
    torch::Tensor weight;
    torch::Tensor bias;
    int64_t fan_in = 0;
    if (auto* lin = layer.as<torch::nn::Linear>()) {
        weight = lin->weight;
        bias = lin->bias;
        fan_in = weight.size(1);
    } else if (auto* conv = layer.as<torch::nn::Conv2d>()) {
        weight = conv->weight;
        bias = conv->bias;
        fan_in = weight.size(1) * weight.size(2) * weight.size(3);
    } else if (auto* deconv = layer.as<torch::nn::ConvTranspose2d>()) {
        // weight layout [in, out, kh, kw]; each output pixel only sees
        // kh*kw/(sh*sw) taps per input channel.
        weight = deconv->weight;
        bias = deconv->bias;
        const auto& stride = deconv->options.stride();
        fan_in = std::max<int64_t>(1, weight.size(0) * weight.size(2) * weight.size(3) / (stride->at(0) * stride->at(1)));
    } else {
        return;
    }
    weight.normal_(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)), gen);
    if (bias.defined())
        bias.zero_();
}

}  // namespace

void init_weights(torch::nn::Module& module, std::uint64_t seed)
{
    auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
    torch::NoGradGuard guard;
    // Modules under construction are not yet owned by a shared_ptr, so the
    // root is visited directly rather than through modules(true).
    init_layer(module, gen);
    for (auto& child : module.modules(/*include_self=*/false))
        init_layer(*child, gen);
}

void scale_output_layer(torch::nn::Sequential& seq, double factor)
{
    torch::NoGradGuard guard;
    for (auto it = seq->children().rbegin(); it != seq->children().rend(); ++it) {
        if (auto* lin = (*it)->as<torch::nn::Linear>()) {
            lin->weight.mul_(factor);
            return;
        }
        if (auto* conv = (*it)->as<torch::nn::Conv2d>()) {
            conv->weight.mul_(factor);
            return;
        }
        if (auto* deconv = (*it)->as<torch::nn::ConvTranspose2d>()) {
            deconv->weight.mul_(factor);
            return;
        }
    }
    throw std::invalid_argument("sequence has no weighted layer");
}

torch::nn::Sequential make_mlp(int64_t in, int64_t hidden, int64_t out, int layers)
{
    if (layers < 1)
        throw std::invalid_argument("an MLP needs at least one layer");
    torch::nn::Sequential seq;
    int64_t width = in;
    for (int l = 0; l + 1 < layers; ++l) {
        seq->push_back(torch::nn::Linear(width, hidden));
        seq->push_back(torch::nn::PReLU());
        width = hidden;
    }
    seq->push_back(torch::nn::Linear(width, out));
    return seq;
}

}  // namespace vlscc
