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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace vlscc {

class SideLinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Huffman-coded quant map for the error-free side link.
///
/// Wire layout, all multi-byte fields big-endian:
///
///     offset  size  field
///     0       1     magic 0xA7
///     1       1     version (1)
///     2       1     L, number of levels (2..255)
///     3       2     rows
///     5       2     cols
///     7       L     canonical Huffman code length per level, 0 = unused
///     7+L     P     payload, codewords MSB-first, zero-padded to a byte
///     7+L+P   4     CRC-32 of every preceding byte
///
/// P is implied by the table and rows*cols, so the parser rejects any
/// truncation, trailing bytes, nonzero padding, or checksum mismatch.
struct SideLinkPacket {
    static constexpr std::uint8_t kMagic = 0xA7;
    static constexpr std::uint8_t kVersion = 1;

    int levels = 2;
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> code_lengths;  // one per level
    std::vector<std::uint8_t> payload;
    std::size_t payload_bits = 0;

    // Bits spent on the code table (8 per level).
    std::size_t table_bits() const { return code_lengths.size() * 8; }
    // Table plus payload codewords; the figure reported as side-link cost.
    std::size_t cost_bits() const { return table_bits() + payload_bits; }

    std::vector<std::uint8_t> serialize() const;
    static SideLinkPacket parse(std::span<const std::uint8_t> bytes);
};

/// Huffman code lengths for the given symbol frequencies. Unused symbols get
/// length 0; a single used symbol gets length 1. Ties break toward the lower
/// symbol index so the table is deterministic.
std::vector<std::uint8_t> huffman_code_lengths(std::span<const std::uint64_t> frequencies);

// Canonical codewords for a length table (0 entries skipped).
std::vector<std::uint64_t> canonical_codes(std::span<const std::uint8_t> lengths);

SideLinkPacket sidelink_encode(const QuantMap& quant);

/// Exact inverse of sidelink_encode. Throws SideLinkError on malformed input.
QuantMap sidelink_decode(const SideLinkPacket& packet);

// Mean codeword length in bits per level for a packet's payload.
double average_code_length(const SideLinkPacket& packet);

}  // namespace vlscc
