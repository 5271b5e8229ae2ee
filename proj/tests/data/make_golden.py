#!/usr/bin/env python3
# Copyright 2026 The VL-SCC Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the binary fixtures by hand from the documented wire layouts."""

import struct
import zlib

# Side-link packet for the 1x4 map [0, 0, 1, 2] with L = 4.
# Frequencies {2, 1, 1, 0} give code lengths {1, 2, 2, 0}; canonical codes
# 0 -> 0, 1 -> 10, 2 -> 11, so the payload is 0 0 10 11 plus two pad bits.
body = bytes([0xA7, 1, 4, 0, 1, 0, 4, 1, 2, 2, 0, 0b00101100])
with open("sidelink_1x4_L4.bin", "wb") as f:
    f.write(body + struct.pack(">I", zlib.crc32(body)))

# Checkpoint with a float [2, 2] tensor and an int64 [1] tensor at step 17.
meta = b'{"note":"golden"}'
out = b"VLSCCKPT" + struct.pack("<Iq", 1, 17) + struct.pack("<I", len(meta)) + meta
out += struct.pack("<I", 2)
name = b"w"
out += struct.pack("<H", len(name)) + name + bytes([0, 2]) + struct.pack("<qq", 2, 2)
out += struct.pack("<4f", 1.0, -2.0, 0.5, 3.25)
name = b"opt.step"
out += struct.pack("<H", len(name)) + name + bytes([2, 1]) + struct.pack("<q", 1)
out += struct.pack("<q", 123456789012)
out += struct.pack("<I", zlib.crc32(out))
with open("checkpoint_v1.bin", "wb") as f:
    f.write(out)

# Small raster fixtures for the image readers: a 16x24 RGB gradient saved as
# PNG (lossless) and JPEG (quality 95), plus an 8-bit grayscale PNG.
try:
    from PIL import Image
except ImportError:  # fixtures are committed; regeneration only needs Pillow
    Image = None
if Image is not None:
    rgb = Image.new("RGB", (24, 16))
    rgb.putdata([(x * 10, y * 15, (x + y) * 5) for y in range(16) for x in range(24)])
    rgb.save("gradient_24x16.png")
    rgb.save("gradient_24x16.jpg", quality=95)
    gray = Image.new("L", (8, 8))
    gray.putdata([i * 4 for i in range(64)])
    gray.save("gray_8x8.png")
