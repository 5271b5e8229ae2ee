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

#include "vlscc/sidelink.hpp"

#include <zlib.h>

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

namespace vlscc {

namespace {

constexpr std::size_t kHeaderBytes = 7;
constexpr std::size_t kCrcBytes = 4;

class BitWriter {
public:
    void put(std::uint64_t code, int length)
    {
        for (int b = length - 1; b >= 0; --b) {
            if (bits_ % 8 == 0)
                bytes_.push_back(0);
            if ((code >> b) & 1U)
                bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ % 8));
            ++bits_;
        }
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }
    std::size_t bits() const { return bits_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    int next()
    {
        if (pos_ >= bytes_.size() * 8)
            throw SideLinkError("side-link payload truncated");
        const int bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
        ++pos_;
        return bit;
    }
    std::size_t position() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes)
{
    return static_cast<std::uint32_t>(
        ::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

void check_table(std::span<const std::uint8_t> lengths)
{
    // Kraft sum in units of 2^-64; lengths beyond 63 cannot occur for maps
    // that fit the 16-bit shape fields.
    unsigned __int128 kraft = 0;
    int used = 0;
    for (std::uint8_t len : lengths) {
        if (len == 0)
            continue;
        if (len > 63)
            throw SideLinkError("code length " + std::to_string(len) + " out of range");
        kraft += static_cast<unsigned __int128>(1) << (64 - len);
        ++used;
    }
    const unsigned __int128 one = static_cast<unsigned __int128>(1) << 64;
    if (used == 1) {
        if (kraft != one / 2)
            throw SideLinkError("single-symbol table must use a 1-bit code");
    } else if (used > 1 && kraft != one) {
        throw SideLinkError("code table is not a complete prefix code");
    }
}

}  // namespace

std::vector<std::uint8_t> huffman_code_lengths(std::span<const std::uint64_t> frequencies)
{
    std::vector<std::uint8_t> lengths(frequencies.size(), 0);
    struct Node {
        std::uint64_t weight;
        std::size_t order;  // smallest symbol index below this node
        int left = -1;
        int right = -1;
        int symbol = -1;
    };
    std::vector<Node> nodes;
    using Entry = std::tuple<std::uint64_t, std::size_t, int>;  // weight, order, node
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::size_t s = 0; s < frequencies.size(); ++s) {
        if (frequencies[s] == 0)
            continue;
        nodes.push_back({frequencies[s], s, -1, -1, static_cast<int>(s)});
        heap.emplace(frequencies[s], s, static_cast<int>(nodes.size() - 1));
    }
    if (nodes.empty())
        return lengths;
    if (nodes.size() == 1) {
        lengths[static_cast<std::size_t>(nodes[0].symbol)] = 1;
        return lengths;
    }
    while (heap.size() > 1) {
        const auto [wa, oa, a] = heap.top();
        heap.pop();
        const auto [wb, ob, b] = heap.top();
        heap.pop();
        nodes.push_back({wa + wb, std::min(oa, ob), a, b, -1});
        heap.emplace(wa + wb, std::min(oa, ob), static_cast<int>(nodes.size() - 1));
    }
    // iterative depth walk from the root
    std::vector<std::pair<int, int>> stack{{std::get<2>(heap.top()), 0}};
    while (!stack.empty()) {
        const auto [n, depth] = stack.back();
        stack.pop_back();
        const Node& node = nodes[static_cast<std::size_t>(n)];
        if (node.symbol >= 0) {
            lengths[static_cast<std::size_t>(node.symbol)] = static_cast<std::uint8_t>(depth);
        } else {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    return lengths;
}

std::vector<std::uint64_t> canonical_codes(std::span<const std::uint8_t> lengths)
{
    std::vector<std::size_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    std::vector<std::uint64_t> codes(lengths.size(), 0);
    std::uint64_t code = 0;
    int prev = 0;
    bool first = true;
    for (std::size_t s : order) {
        const int len = lengths[s];
        if (len == 0)
            continue;
        if (first) {
            code = 0;
            first = false;
        } else {
            code = (code + 1) << (len - prev);
        }
        prev = len;
        codes[s] = code;
    }
    return codes;
}

SideLinkPacket sidelink_encode(const QuantMap& quant)
{
    check_levels(quant.levels);
    if (quant.levels > 255)
        throw std::invalid_argument("side link supports at most 255 levels");
    if (quant.rows > 0xFFFF || quant.cols > 0xFFFF)
        throw std::invalid_argument("quant map too large for the side-link header");

    std::vector<std::uint64_t> freq(static_cast<std::size_t>(quant.levels), 0);
    for (int q : quant.values)
        ++freq[static_cast<std::size_t>(q)];

    SideLinkPacket p;
    p.levels = quant.levels;
    p.rows = quant.rows;
    p.cols = quant.cols;
    p.code_lengths = huffman_code_lengths(freq);
    const auto codes = canonical_codes(p.code_lengths);

    BitWriter out;
    for (int q : quant.values) {
        const auto s = static_cast<std::size_t>(q);
        out.put(codes[s], p.code_lengths[s]);
    }
    p.payload_bits = out.bits();
    p.payload = out.take();
    return p;
}

QuantMap sidelink_decode(const SideLinkPacket& packet)
{
    if (packet.levels < 2 || packet.levels > 255 ||
        packet.code_lengths.size() != static_cast<std::size_t>(packet.levels))
        throw SideLinkError("side-link header inconsistent with code table");
    if (packet.rows < 0 || packet.cols < 0)
        throw SideLinkError("negative side-link shape");
    check_table(packet.code_lengths);

    const std::size_t count = static_cast<std::size_t>(packet.rows) * packet.cols;
    const auto codes = canonical_codes(packet.code_lengths);
    int max_len = 0;
    for (auto len : packet.code_lengths)
        max_len = std::max<int>(max_len, len);
    if (count > 0 && max_len == 0)
        throw SideLinkError("empty code table for a non-empty map");

    // (length, code) -> symbol lookup per length
    std::vector<std::vector<std::pair<std::uint64_t, int>>> by_length(static_cast<std::size_t>(max_len) + 1);
    for (std::size_t s = 0; s < codes.size(); ++s)
        if (packet.code_lengths[s] != 0)
            by_length[packet.code_lengths[s]].emplace_back(codes[s], static_cast<int>(s));

    BitReader in(packet.payload);
    std::vector<int> values;
    values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t code = 0;
        int symbol = -1;
        for (int len = 1; len <= max_len && symbol < 0; ++len) {
            code = (code << 1) | static_cast<std::uint64_t>(in.next());
            for (const auto& [c, s] : by_length[static_cast<std::size_t>(len)])
                if (c == code) {
                    symbol = s;
                    break;
                }
        }
        if (symbol < 0)
            throw SideLinkError("invalid codeword in side-link payload");
        values.push_back(symbol);
    }
    const std::size_t used = in.position();
    if ((used + 7) / 8 != packet.payload.size())
        throw SideLinkError("side-link payload length mismatch");
    for (std::size_t b = used; b < packet.payload.size() * 8; ++b)
        if ((packet.payload[b / 8] >> (7 - b % 8)) & 1)
            throw SideLinkError("nonzero padding in side-link payload");
    return QuantMap(packet.rows, packet.cols, packet.levels, std::move(values));
}

std::vector<std::uint8_t> SideLinkPacket::serialize() const
{
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + code_lengths.size() + payload.size() + kCrcBytes);
    out.push_back(kMagic);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(levels));
    out.push_back(static_cast<std::uint8_t>(rows >> 8));
    out.push_back(static_cast<std::uint8_t>(rows & 0xFF));
    out.push_back(static_cast<std::uint8_t>(cols >> 8));
    out.push_back(static_cast<std::uint8_t>(cols & 0xFF));
    out.insert(out.end(), code_lengths.begin(), code_lengths.end());
    out.insert(out.end(), payload.begin(), payload.end());
    const std::uint32_t crc = crc32_of(out);
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>((crc >> shift) & 0xFF));
    return out;
}

SideLinkPacket SideLinkPacket::parse(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderBytes + kCrcBytes)
        throw SideLinkError("side-link packet too short");
    if (bytes[0] != kMagic)
        throw SideLinkError("bad side-link magic");
    if (bytes[1] != kVersion)
        throw SideLinkError("unsupported side-link version " + std::to_string(bytes[1]));

    const std::size_t body = bytes.size() - kCrcBytes;
    std::uint32_t stored = 0;
    for (std::size_t k = 0; k < kCrcBytes; ++k)
        stored = (stored << 8) | bytes[body + k];
    if (stored != crc32_of(bytes.first(body)))
        throw SideLinkError("side-link checksum mismatch");

    SideLinkPacket p;
    p.levels = bytes[2];
    p.rows = (bytes[3] << 8) | bytes[4];
    p.cols = (bytes[5] << 8) | bytes[6];
    if (p.levels < 2 || body < kHeaderBytes + static_cast<std::size_t>(p.levels))
        throw SideLinkError("side-link code table truncated");
    const auto table = bytes.subspan(kHeaderBytes, static_cast<std::size_t>(p.levels));
    p.code_lengths.assign(table.begin(), table.end());
    check_table(p.code_lengths);

    std::size_t bits = 0;
    // Payload length is implied only after decoding; take the remainder and
    // let sidelink_decode verify it is exactly consumed.
    const auto payload = bytes.subspan(kHeaderBytes + table.size(), body - kHeaderBytes - table.size());
    p.payload.assign(payload.begin(), payload.end());
    const QuantMap decoded = sidelink_decode(p);
    for (int q : decoded.values)
        bits += p.code_lengths[static_cast<std::size_t>(q)];
    p.payload_bits = bits;
    return p;
}

double average_code_length(const SideLinkPacket& packet)
{
    const std::size_t count = static_cast<std::size_t>(packet.rows) * packet.cols;
    return count == 0 ? 0.0 : static_cast<double>(packet.payload_bits) / static_cast<double>(count);
}

}  // namespace vlscc
