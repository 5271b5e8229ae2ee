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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace vlscc {

// Interleaved RGB image, values in [0, 1], row-major HWC.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;

    Image() = default;
    Image(int height, int width) : height(height), width(width), pixels(static_cast<std::size_t>(height) * width * 3, 0.0f) {}

    float& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    float at(int y, int x, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

/// Reads PNG, JPEG, or binary PPM/PGM. Grayscale is expanded to RGB.
/// Throws std::runtime_error on unreadable or unsupported files.
Image read_image(const std::filesystem::path& path);

// Binary PGM (P5), 8-bit; values are clamped to [0, 1] before scaling.
void write_pgm(const std::filesystem::path& path, int height, int width, std::span<const float> gray);

void write_ppm(const std::filesystem::path& path, const Image& image);

/// Largest centered crop whose sides are multiples of `multiple`.
Image center_crop_to_multiple(const Image& image, int multiple);

Image crop(const Image& image, int top, int left, int height, int width);

Image flip_horizontal(const Image& image);

}  // namespace vlscc
