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

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace vlscc {

using Joint = std::array<double, 3>;

// K joints of one sample.
using JointSet = std::vector<Joint>;

/// PSNR in dB for signals in [0, 1]: 10 log10(1 / MSE). Returns +infinity
/// when the inputs are identical.
double psnr(std::span<const float> x, std::span<const float> y);
double psnr_from_mse(double mse);

double mean_squared_error(std::span<const float> x, std::span<const float> y);

/// Mean per-joint position error: average Euclidean distance over M samples
/// and K joints, in whatever units the joints are given.
double mpjpe(std::span<const JointSet> truth, std::span<const JointSet> estimate);

// Groups consecutive triples of a flat vector into joints.
JointSet as_joints(std::span<const float> flat);

/// Complex symbols per pixel: (real_symbols / 2) / (H W).
double spp(double real_symbols, int height, int width);

/// Mean kept fraction over frames, each described by its quant map.
double mask_density(std::span<const QuantMap> frames, int symbols);

}  // namespace vlscc
