// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/huffman.hpp"
#include "core/reduce.hpp"
#include "core/sparse.hpp"
#include "core/tensor.hpp"

namespace wtc {

// A serialized format section: `bytes` is the full little-endian section
// (fixed header + fields, each bit-packed field padded to a byte boundary);
// `body_bits` counts the meaningful field bits without header or padding and
// equals the fixed32 accounting total exactly.
struct SerializedSection {
  std::vector<uint8_t> bytes;
  uint64_t body_bits = 0;
};

SerializedSection serialize(const BsrMatrix& b);
SerializedSection serialize(const SbsrMatrix& s);   // canonical form is emitted
SerializedSection serialize(const EncodedTensor& e);

BsrMatrix deserialize_bsr(std::span<const uint8_t> bytes);
SbsrMatrix deserialize_sbsr(std::span<const uint8_t> bytes);
EncodedTensor deserialize_encoded(std::span<const uint8_t> bytes);

enum class PackFormat : uint8_t { bsr, sbsr, ehuff, vhuff };

const char* to_string(PackFormat f);
PackFormat pack_format_from_string(const std::string& s);

// Packs q16 tensors into a container of format sections (one per tensor,
// original name/shape/kind preserved in the manifest). Widths: conv layers
// use their kernel width, FC layers use fc_width; ehuff ignores widths.
void pack_container(const std::vector<DenseTensor>& tensors, PackFormat format,
                    uint32_t fc_width, const std::string& path);

// Decodes a packed container back to the exact q16 tensors.
std::vector<DenseTensor> unpack_container(const std::string& path);

}  // namespace wtc
