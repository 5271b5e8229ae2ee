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

#include "vlscc/datasrc.hpp"

#include "vlscc/channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <stdexcept>

namespace vlscc {

void MixtureSpec::validate() const
{
    if (dim < 1)
        throw std::invalid_argument("mixture dimension must be >= 1");
    if (components.empty())
        throw std::invalid_argument("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0 || c.intrinsic_dim < 1 || c.intrinsic_dim > dim || c.noise < 0.0)
            throw std::invalid_argument("invalid mixture component");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mixture weights must sum to 1");
}

namespace {

Eigen::MatrixXd orthonormal_basis(int dim, int k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(dim, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < dim; ++i)
            a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(dim, k);
}

}  // namespace

VectorBatch gen_vectors(int count, const MixtureSpec& spec, std::uint64_t seed)
{
    spec.validate();
    if (count < 1)
        throw std::invalid_argument("sample count must be >= 1");

    std::vector<Eigen::MatrixXd> bases;
    std::vector<double> weights;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        const double gain = std::sqrt(static_cast<double>(spec.dim) / comp.intrinsic_dim);
        bases.push_back(gain * orthonormal_basis(spec.dim, comp.intrinsic_dim, mix_seed(spec.basis_seed, c)));
        weights.push_back(comp.weight);
    }

    std::mt19937_64 rng(mix_seed(seed, 0));
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::normal_distribution<double> gauss;

    VectorBatch batch{count, spec.dim, std::vector<float>(static_cast<std::size_t>(count) * spec.dim), {}};
    batch.labels.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        const int c = pick(rng);
        const auto& comp = spec.components[static_cast<std::size_t>(c)];
        Eigen::VectorXd z(comp.intrinsic_dim);
        for (int j = 0; j < comp.intrinsic_dim; ++j)
            z(j) = gauss(rng);
        Eigen::VectorXd x = bases[static_cast<std::size_t>(c)] * z;
        for (int i = 0; i < spec.dim; ++i) {
            double v = x(i);
            if (comp.noise > 0.0)
                v += comp.noise * gauss(rng);
            batch.values[static_cast<std::size_t>(n) * spec.dim + i] = static_cast<float>(v);
        }
        batch.labels.push_back(c);
    }
    return batch;
}

std::optional<ImageTemplate> parse_image_template(const std::string& name)
{
    if (name == "half")
        return ImageTemplate::HalfSplit;
    if (name == "flat")
        return ImageTemplate::Flat;
    if (name == "quadrants")
        return ImageTemplate::Quadrants;
    return std::nullopt;
}

namespace {

// One Gaussian-blurred white-noise field shared by the three channels, each
// with its own base level and signed gain. Correlation length is a couple of
// pixels, so the detail sits well above anything the flat regions carry.
struct Texture {
    static constexpr double kBlurSigma = 3.0;  // pixels

    std::array<double, 3> base{};
    std::array<double, 3> gain{};
    int width = 0;
    std::vector<double> field;  // H x W, zero mean and unit variance

    static Texture random(std::mt19937_64& rng, int height, int width)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Texture t;
        for (std::size_t c = 0; c < 3; ++c) {
            t.base[c] = 0.3 + 0.4 * unit(rng);
            t.gain[c] = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 0.1 * unit(rng));
        }
        t.width = width;

        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> noise(static_cast<std::size_t>(height) * width);
        for (auto& v : noise)
            v = normal(rng);

        const int radius = static_cast<int>(std::ceil(3.0 * kBlurSigma));
        std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
        for (int k = -radius; k <= radius; ++k)
            kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (kBlurSigma * kBlurSigma));
        // Edges are handled by wrapping, which keeps the statistics stationary.
        auto blur = [&](const std::vector<double>& in, bool along_x) {
            std::vector<double> out(in.size(), 0.0);
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    double acc = 0.0;
                    for (int k = -radius; k <= radius; ++k) {
                        const int yy = along_x ? y : (y + k + height) % height;
                        const int xx = along_x ? (x + k + width) % width : x;
                        acc += kernel[static_cast<std::size_t>(k + radius)] *
                               in[static_cast<std::size_t>(yy) * width + xx];
                    }
                    out[static_cast<std::size_t>(y) * width + x] = acc;
                }
            return out;
        };
        t.field = blur(blur(noise, true), false);

        double mean = 0.0;
        for (double v : t.field)
            mean += v;
        mean /= static_cast<double>(t.field.size());
        double var = 0.0;
        for (double v : t.field)
            var += (v - mean) * (v - mean);
        const double scale = 1.0 / std::sqrt(var / static_cast<double>(t.field.size()));
        for (auto& v : t.field)
            v = (v - mean) * scale;
        return t;
    }

    float value(int y, int x, int c) const
    {
        const auto ch = static_cast<std::size_t>(c);
        const double v = base[ch] + gain[ch] * field[static_cast<std::size_t>(y) * width + x];
        return static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
};

}  // namespace

std::vector<ProceduralImage> gen_procedural_images(int count, int height, int width, std::uint64_t seed,
                                                   ImageTemplate tmpl)
{
    if (height <= 0 || width <= 0 || height % 16 != 0 || width % 16 != 0)
        throw std::invalid_argument("procedural image size must be a positive multiple of 16");
    std::vector<ProceduralImage> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int n = 0; n < count; ++n) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        ProceduralImage p{Image(height, width), std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 0)};

        std::array<double, 3> flat{};
        for (auto& c : flat)
            c = 0.3 + 0.4 * unit(rng);  // same range as the texture base level
        const Texture texture = Texture::random(rng, height, width);

        std::function<bool(int, int)> is_textured = [](int, int) { return false; };
        if (tmpl == ImageTemplate::HalfSplit) {
            const bool vertical = unit(rng) < 0.5;
            const bool first = unit(rng) < 0.5;
            is_textured = [=](int y, int x) {
                const bool in_first = vertical ? x < width / 2 : y < height / 2;
                return in_first == first;
            };
        } else if (tmpl == ImageTemplate::Quadrants) {
            std::uniform_int_distribution<int> subset(1, 14);
            const int bits = subset(rng);
            is_textured = [=](int y, int x) {
                const int quadrant = (y < height / 2 ? 0 : 2) + (x < width / 2 ? 0 : 1);
                return ((bits >> quadrant) & 1) != 0;
            };
        }

        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const bool tex = is_textured(y, x);
                p.textured[static_cast<std::size_t>(y) * width + x] = tex ? 1 : 0;
                for (int c = 0; c < 3; ++c)
                    p.image.at(y, x, c) = tex ? texture.value(y, x, c) : static_cast<float>(flat[static_cast<std::size_t>(c)]);
            }
        out.push_back(std::move(p));
    }
    return out;
}

ImageFolderStream::ImageFolderStream(std::filesystem::path folder, int patch_size, bool augment, std::uint64_t seed)
    : patch_size_(patch_size), augment_(augment), seed_(seed)
{
    if (patch_size <= 0 || patch_size % 16 != 0)
        throw std::invalid_argument("patch size must be a positive multiple of 16");
    if (!std::filesystem::is_directory(folder))
        throw std::runtime_error(folder.string() + " is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(folder))
        if (entry.is_regular_file())
            files_.push_back(entry.path());
    std::sort(files_.begin(), files_.end());
    if (files_.empty())
        throw std::runtime_error(folder.string() + " contains no files");
}

std::optional<Image> ImageFolderStream::next()
{
    while (cursor_ < files_.size()) {
        const std::size_t index = cursor_++;
        const auto& path = files_[index];
        Image img;
        try {
            img = center_crop_to_multiple(read_image(path), 16);
        } catch (const std::exception& e) {
            std::clog << "warning: skipping " << path.string() << ": " << e.what() << '\n';
            continue;
        }
        if (img.height < patch_size_ || img.width < patch_size_) {
            std::clog << "warning: skipping " << path.string() << ": smaller than patch\n";
            continue;
        }
        if (!augment_)
            return crop(img, (img.height - patch_size_) / 2, (img.width - patch_size_) / 2, patch_size_, patch_size_);
        std::mt19937_64 rng(mix_seed(seed_, index));
        std::uniform_int_distribution<int> top(0, img.height - patch_size_);
        std::uniform_int_distribution<int> left(0, img.width - patch_size_);
        const int t = top(rng);
        const int l = left(rng);
        Image patch = crop(img, t, l, patch_size_, patch_size_);
        if (std::bernoulli_distribution(0.5)(rng))
            patch = flip_horizontal(patch);
        return patch;
    }
    return std::nullopt;
}

std::vector<Image> load_image_folder(const std::filesystem::path& folder, int patch_size, bool augment,
                                     std::uint64_t seed)
{
    ImageFolderStream stream(folder, patch_size, augment, seed);
    std::vector<Image> out;
    while (auto img = stream.next())
        out.push_back(std::move(*img));
    if (out.empty())
        throw std::runtime_error(folder.string() + " yielded no usable images");
    return out;
}

}  // namespace vlscc
