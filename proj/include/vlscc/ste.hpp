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

namespace vlscc {

/// Differentiable quantizer. Forward returns the integer levels of r as a
/// floating tensor of the same shape and dtype; backward multiplies the
/// incoming gradient by L-1.
torch::Tensor quantize_ste(const torch::Tensor& rate, int levels);

/// Differentiable prefix mask. q of shape [B] gives [B, N]; q of shape
/// [B, H, W] gives [B, N, H, W]. Backward sums the incoming gradient over the
/// symbol axis weighted by the 3-unit window rule from ratequant.hpp.
torch::Tensor mask_ste(const torch::Tensor& quant, int symbols, int levels);

// Lookup tables indexed [level, symbol].
torch::Tensor mask_table(int symbols, int levels, torch::Dtype dtype);
torch::Tensor mask_gradient_table(int symbols, int levels, torch::Dtype dtype);

}  // namespace vlscc
