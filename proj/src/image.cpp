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

#include "vlscc/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <setjmp.h>
#include <stdexcept>
#include <string>

namespace vlscc {

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    return f;
}

Image read_png(const std::filesystem::path& path)
{
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw std::runtime_error(path.string() + ": " + img.message);
    img.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&img);
        throw std::runtime_error(path.string() + ": " + img.message);
    }
    Image out(static_cast<int>(img.height), static_cast<int>(img.width));
    std::transform(buf.begin(), buf.end(), out.pixels.begin(), [](png_byte v) { return v / 255.0f; });
    return out;
}

struct JpegError {
    jpeg_error_mgr mgr;
    jmp_buf jump;
};

void jpeg_fail(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    longjmp(err->jump, 1);
}

Image read_jpeg(const std::filesystem::path& path)
{
    auto file = open_file(path, "rb");
    jpeg_decompress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_fail;
    std::vector<unsigned char> buf;
    int height = 0;
    int width = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error(path.string() + ": corrupt JPEG");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    height = static_cast<int>(cinfo.output_height);
    width = static_cast<int>(cinfo.output_width);
    buf.resize(static_cast<std::size_t>(height) * width * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        unsigned char* row = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    Image out(height, width);
    std::transform(buf.begin(), buf.end(), out.pixels.begin(), [](unsigned char v) { return v / 255.0f; });
    return out;
}

// Skips whitespace and '#' comments between PNM header fields.
int pnm_field(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    if (!(in >> v))
        throw std::runtime_error("malformed PNM header");
    return v;
}

Image read_pnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P6" && magic != "P5")
        throw std::runtime_error(path.string() + ": only binary PPM/PGM supported");
    const int width = pnm_field(in);
    const int height = pnm_field(in);
    const int maxval = pnm_field(in);
    in.get();
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error(path.string() + ": unsupported PNM geometry");
    const int channels = magic == "P6" ? 3 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in)
        throw std::runtime_error(path.string() + ": truncated PNM data");
    Image out(height, width);
    for (std::size_t p = 0; p < static_cast<std::size_t>(width) * height; ++p)
        for (int c = 0; c < 3; ++c)
            out.pixels[p * 3 + c] = buf[p * channels + (channels == 3 ? c : 0)] / static_cast<float>(maxval);
    return out;
}

std::string lower_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

unsigned char to_byte(float v) { return static_cast<unsigned char>(std::clamp(v, 0.0f, 1.0f) * 255.0f + 0.5f); }

}  // namespace

Image read_image(const std::filesystem::path& path)
{
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        return read_png(path);
    if (ext == ".jpg" || ext == ".jpeg")
        return read_jpeg(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        return read_pnm(path);
    throw std::runtime_error(path.string() + ": unsupported image format");
}

void write_pgm(const std::filesystem::path& path, int height, int width, std::span<const float> gray)
{
    if (gray.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("gray buffer does not match image size");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (float v : gray)
        out.put(static_cast<char>(to_byte(v)));
}

void write_ppm(const std::filesystem::path& path, const Image& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    for (float v : image.pixels)
        out.put(static_cast<char>(to_byte(v)));
}

Image crop(const Image& image, int top, int left, int height, int width)
{
    if (top < 0 || left < 0 || height < 0 || width < 0 || top + height > image.height ||
        left + width > image.width)
        throw std::invalid_argument("crop window outside image");
    Image out(height, width);
    for (int y = 0; y < height; ++y)
        std::copy_n(image.pixels.begin() + ((static_cast<std::ptrdiff_t>(top) + y) * image.width + left) * 3,
                    static_cast<std::ptrdiff_t>(width) * 3,
                    out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * width * 3);
    return out;
}

Image center_crop_to_multiple(const Image& image, int multiple)
{
    const int h = image.height / multiple * multiple;
    const int w = image.width / multiple * multiple;
    return crop(image, (image.height - h) / 2, (image.width - w) / 2, h, w);
}

Image flip_horizontal(const Image& image)
{
    Image out(image.height, image.width);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
    return out;
}

}  // namespace vlscc
