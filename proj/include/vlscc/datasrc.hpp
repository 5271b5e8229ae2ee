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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlscc {

struct MixtureComponent {
    double weight = 1.0;
    int intrinsic_dim = 1;  // k
    double noise = 0.0;     // per-entry isotropic noise std
};

/// Mixture of linear-Gaussian sources sharing an embedding dimension D.
/// Component c draws z ~ N(0, I_k) and emits sqrt(D/k) U_c z + noise, where
/// U_c is a fixed D x k orthonormal basis derived from basis_seed. Every
/// component therefore carries the same expected energy D while occupying a
/// subspace of a different size.
struct MixtureSpec {
    int dim = 64;
    std::vector<MixtureComponent> components{{0.5, 4, 0.0}, {0.5, 48, 0.0}};
    std::uint64_t basis_seed = 1;

    void validate() const;
};

struct VectorBatch {
    int count = 0;
    int dim = 0;
    std::vector<float> values;  // count x dim
    std::vector<int> labels;    // component index per sample
};

VectorBatch gen_vectors(int count, const MixtureSpec& spec, std::uint64_t seed);

enum class ImageTemplate { HalfSplit, Flat, Quadrants };

std::optional<ImageTemplate> parse_image_template(const std::string& name);

struct ProceduralImage {
    Image image;
    std::vector<std::uint8_t> textured;  // H x W, 1 where the pixel is textured
};

/// Synthetic images made of flat-colour regions and high-frequency textures.
/// HalfSplit textures exactly one half (left/right or top/bottom), Flat has
/// no texture, Quadrants textures a random non-empty proper subset of the
/// four quadrants.
std::vector<ProceduralImage> gen_procedural_images(int count, int height, int width, std::uint64_t seed,
                                                   ImageTemplate tmpl = ImageTemplate::HalfSplit);

/// Ordered, restartable stream of patches from an image folder. Files are
/// visited in lexicographic order; each is centre-cropped to multiples of 16,
/// then cut to a patch (random position and flip when augmenting, centre
/// otherwise). Unreadable or too-small files are skipped with a warning.
class ImageFolderStream {
public:
    ImageFolderStream(std::filesystem::path folder, int patch_size, bool augment, std::uint64_t seed);

    std::optional<Image> next();
    void reset() { cursor_ = 0; }
    std::size_t file_count() const { return files_.size(); }

private:
    std::vector<std::filesystem::path> files_;
    int patch_size_;
    bool augment_;
    std::uint64_t seed_;
    std::size_t cursor_ = 0;
};

// Drains a fresh stream into memory.
std::vector<Image> load_image_folder(const std::filesystem::path& folder, int patch_size, bool augment,
                                     std::uint64_t seed);

}  // namespace vlscc
