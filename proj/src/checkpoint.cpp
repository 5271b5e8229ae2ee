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

#include "vlscc/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vlscc {

namespace {

constexpr char kMagic[8] = {'V', 'L', 'S', 'C', 'C', 'K', 'P', 'T'};

class Writer {
public:
    template <typename T>
    void put(T v)
    {
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        bytes.insert(bytes.end(), raw, raw + sizeof(T));  // host is little-endian (x86-64 / aarch64)
    }
    void put_bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        bytes.insert(bytes.end(), p, p + n);
    }
    std::vector<unsigned char> bytes;
};

class Reader {
public:
    explicit Reader(const std::vector<unsigned char>& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

    template <typename T>
    T get()
    {
        T v;
        std::memcpy(&v, take(sizeof(T)), sizeof(T));
        return v;
    }
    const unsigned char* take(std::size_t n)
    {
        if (n > end_ - pos_)
            throw std::runtime_error("checkpoint truncated");
        const auto* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    bool done() const { return pos_ == end_; }

private:
    const std::vector<unsigned char>& bytes_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

std::uint8_t dtype_code(torch::Dtype t)
{
    switch (t) {
    case torch::kFloat32: return 0;
    case torch::kFloat64: return 1;
    case torch::kInt64: return 2;
    default: throw std::invalid_argument("checkpoint supports float32, float64 and int64 tensors");
    }
}

torch::Dtype dtype_from(std::uint8_t code)
{
    switch (code) {
    case 0: return torch::kFloat32;
    case 1: return torch::kFloat64;
    case 2: return torch::kInt64;
    default: throw std::runtime_error("unknown tensor dtype in checkpoint");
    }
}

std::uint32_t crc(const unsigned char* data, std::size_t n)
{
    return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

}  // namespace

const torch::Tensor* Checkpoint::find(const std::string& name) const
{
    for (const auto& [n, t] : tensors)
        if (n == name)
            return &t;
    return nullptr;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt)
{
    Writer w;
    w.put_bytes(kMagic, sizeof(kMagic));
    w.put<std::uint32_t>(Checkpoint::kVersion);
    w.put<std::int64_t>(ckpt.step);
    const std::string meta = ckpt.metadata.dump();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
    w.put_bytes(meta.data(), meta.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
        const auto t = tensor.detach().contiguous().cpu();
        w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
        w.put_bytes(name.data(), name.size());
        w.put<std::uint8_t>(dtype_code(t.scalar_type()));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dim()));
        for (auto d : t.sizes())
            w.put<std::int64_t>(d);
        w.put_bytes(t.data_ptr(), t.numel() * t.element_size());
    }
    w.put<std::uint32_t>(crc(w.bytes.data(), w.bytes.size()));

    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
        if (!out)
            throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open checkpoint " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof(kMagic) + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path.string() + " is not a checkpoint");
    const std::size_t body = bytes.size() - 4;
    std::uint32_t stored = 0;
    std::memcpy(&stored, bytes.data() + body, 4);
    if (stored != crc(bytes.data(), body))
        throw std::runtime_error(path.string() + ": checksum mismatch");

    Reader r(bytes, body);
    r.take(sizeof(kMagic));
    const auto version = r.get<std::uint32_t>();
    if (version != Checkpoint::kVersion)
        throw std::runtime_error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    Checkpoint ckpt;
    ckpt.step = r.get<std::int64_t>();
    const auto meta_len = r.get<std::uint32_t>();
    const auto* meta = r.take(meta_len);
    ckpt.metadata = nlohmann::json::parse(meta, meta + meta_len);
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto name_len = r.get<std::uint16_t>();
        const auto* name = r.take(name_len);
        const auto dtype = dtype_from(r.get<std::uint8_t>());
        const auto rank = r.get<std::uint8_t>();
        std::vector<int64_t> shape(rank);
        for (auto& d : shape) {
            d = r.get<std::int64_t>();
            if (d < 0)
                throw std::runtime_error("negative tensor dimension in checkpoint");
        }
        auto t = torch::empty(shape, dtype);
        const auto nbytes = static_cast<std::size_t>(t.numel()) * t.element_size();
        std::memcpy(t.data_ptr(), r.take(nbytes), nbytes);
        ckpt.tensors.emplace_back(std::string(reinterpret_cast<const char*>(name), name_len), std::move(t));
    }
    if (!r.done())
        throw std::runtime_error(path.string() + ": trailing bytes after tensors");
    return ckpt;
}

void append_module_state(Checkpoint& ckpt, const torch::nn::Module& module, const std::string& prefix)
{
    for (const auto& item : module.named_parameters(true))
        ckpt.tensors.emplace_back(prefix + item.key(), item.value().detach().clone());
    for (const auto& item : module.named_buffers(true))
        ckpt.tensors.emplace_back(prefix + item.key(), item.value().detach().clone());
}

void restore_module_state(const Checkpoint& ckpt, torch::nn::Module& module, const std::string& prefix)
{
    torch::NoGradGuard guard;
    auto restore = [&](const std::string& name, torch::Tensor& target) {
        const auto* t = ckpt.find(prefix + name);
        if (!t)
            throw std::runtime_error("checkpoint lacks tensor " + prefix + name);
        if (t->sizes() != target.sizes())
            throw std::runtime_error("shape mismatch for " + prefix + name);
        target.copy_(*t);
    };
    for (auto& item : module.named_parameters(true))
        restore(item.key(), item.value());
    for (auto& item : module.named_buffers(true))
        restore(item.key(), item.value());
}

}  // namespace vlscc
