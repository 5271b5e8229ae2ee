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

namespace vlscc {

// Seeded He-normal initialisation of every Linear / Conv / ConvTranspose
// weight below `module`; biases start at zero.
void init_weights(torch::nn::Module& module, std::uint64_t seed);

// Scales the weight of the final Linear / Conv / ConvTranspose layer of `seq`.
void scale_output_layer(torch::nn::Sequential& seq, double factor);

/// Fully-connected stack of `layers` Linear maps with PReLU in between.
torch::nn::Sequential make_mlp(int64_t in, int64_t hidden, int64_t out, int layers);

}  // namespace vlscc
