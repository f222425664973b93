// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace wtc {

// On-disk container ("WTC1"): 4-byte magic, u64 little-endian manifest
// length, UTF-8 JSON manifest, then raw little-endian payload bytes. The
// manifest records name, shape, dtype, kind, and the byte offset/length of
// each payload (offsets relative to the payload area). docs/FORMATS.md
// documents the layout byte by byte.

// One manifest entry plus its payload bytes. dtype is kept as a string at
// this level so packed-section entries ("bsr", "sbsr", "ehuff", "vhuff") ride
// the same manifest as plain tensors ("float32", "q16").
struct RawEntry {
  std::string name;
  std::vector<uint64_t> shape;
  std::string dtype;
  LayerKind kind = LayerKind::fully_connected;
  uint32_t scale_bits = 0;  // float32 bit pattern; meaningful for dtype "q16"
  std::vector<uint8_t> bytes;
};

std::vector<RawEntry> read_raw_container(const std::string& path);
void write_raw_container(const std::vector<RawEntry>& entries, const std::string& path);

// Tensor-level views: load rejects anything that is not float32/q16 and
// verifies payload sizes against shapes; save validates tensors and unique
// names. Byte streams round-trip float payloads bit-exactly (signed zero,
// subnormals, NaN payloads included).
std::vector<DenseTensor> load_container(const std::string& path);
void save_container(const std::vector<DenseTensor>& tensors, const std::string& path);

}  // namespace wtc
