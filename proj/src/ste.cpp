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

#include "vlscc/ste.hpp"

#include "vlscc/ratequant.hpp"

#include <stdexcept>

namespace vlscc {

namespace {

using torch::autograd::AutogradContext;
using torch::autograd::tensor_list;

class QuantizeFunction : public torch::autograd::Function<QuantizeFunction> {
public:
    static torch::Tensor forward(AutogradContext* ctx, const torch::Tensor& rate, int64_t levels)
    {
        ctx->saved_data["levels"] = levels;
        auto r = rate.detach().to(torch::kFloat64).contiguous();
        auto out = torch::empty_like(r);
        const double* src = r.data_ptr<double>();
        double* dst = out.data_ptr<double>();
        for (int64_t k = 0; k < r.numel(); ++k)
            dst[k] = quantize_clamped(src[k], static_cast<int>(levels));
        return out.to(rate.scalar_type());
    }

    static tensor_list backward(AutogradContext* ctx, tensor_list grad)
    {
        const auto levels = ctx->saved_data["levels"].toInt();
        return {grad[0] * static_cast<double>(levels - 1), torch::Tensor()};
    }
};

class MaskFunction : public torch::autograd::Function<MaskFunction> {
public:
    static torch::Tensor forward(AutogradContext* ctx, const torch::Tensor& quant, int64_t symbols,
                                 int64_t levels)
    {
        const auto dtype = quant.scalar_type();
        const auto idx = quant.detach().round().to(torch::kLong).clamp(0, levels - 1).reshape({-1});
        auto bits = mask_table(static_cast<int>(symbols), static_cast<int>(levels), dtype)
                        .index_select(0, idx);
        auto weights =
            mask_gradient_table(static_cast<int>(symbols), static_cast<int>(levels), dtype)
                .index_select(0, idx);

        std::vector<int64_t> shape = quant.sizes().vec();
        shape.push_back(symbols);
        bits = bits.reshape(shape);
        weights = weights.reshape(shape);
        if (quant.dim() == 3) {
            bits = bits.permute({0, 3, 1, 2}).contiguous();
            weights = weights.permute({0, 3, 1, 2}).contiguous();
        }
        ctx->save_for_backward({weights});
        return bits;
    }

    static tensor_list backward(AutogradContext* ctx, tensor_list grad)
    {
        const auto weights = ctx->get_saved_variables()[0];
        return {(grad[0] * weights).sum(1), torch::Tensor(), torch::Tensor()};
    }
};

}  // namespace

torch::Tensor mask_table(int symbols, int levels, torch::Dtype dtype)
{
    auto table = torch::zeros({levels, symbols}, torch::kFloat64);
    auto acc = table.accessor<double, 2>();
    for (int q = 0; q < levels; ++q) {
        const RateMask m = make_mask(q, symbols, levels);
        for (int i = 0; i < symbols; ++i)
            acc[q][i] = m[static_cast<std::size_t>(i)];
    }
    return table.to(dtype);
}

torch::Tensor mask_gradient_table(int symbols, int levels, torch::Dtype dtype)
{
    auto table = torch::zeros({levels, symbols}, torch::kFloat64);
    auto acc = table.accessor<double, 2>();
    for (int q = 0; q < levels; ++q)
        for (int i = 0; i < symbols; ++i)
            acc[q][i] = mask_gradient_weight(i, q, symbols, levels);
    return table.to(dtype);
}

torch::Tensor quantize_ste(const torch::Tensor& rate, int levels)
{
    check_levels(levels);
    return QuantizeFunction::apply(rate, levels);
}

torch::Tensor mask_ste(const torch::Tensor& quant, int symbols, int levels)
{
    check_levels(levels);
    if (symbols < 1)
        throw std::invalid_argument("symbol count must be >= 1");
    if (quant.dim() != 1 && quant.dim() != 3)
        throw std::invalid_argument("mask_ste expects quant levels of shape [B] or [B, H, W]");
    return MaskFunction::apply(quant, symbols, levels);
}

}  // namespace vlscc
