// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "core/types.hpp"

namespace wtc {

enum class SymbolKind : uint8_t { element, vector };

struct CodeEntry {
  std::vector<int16_t> symbol;  // width values (one for element symbols)
  uint64_t code = 0;            // MSB-aligned within `length` bits
  uint8_t length = 0;
};

// Canonical prefix code: entries sorted by (length, symbol), codewords
// assigned by counting upward and left-shifting at each length step. For two
// or more symbols the code is complete (Kraft sum exactly 1); a lone symbol
// gets the 1-bit code "0".
struct Codebook {
  SymbolKind kind = SymbolKind::element;
  uint32_t width = 1;
  std::vector<CodeEntry> entries;

  void validate() const;  // canonical order, prefix-freedom, Kraft equality
};

struct Coord {
  uint32_t row = 0;
  uint32_t col = 0;  // element column, or block column for vector symbols
};

// An entropy-coded sparse matrix: nonzero symbols only, addressed by raw
// coordinates, payload codes concatenated MSB-first in coordinate order.
struct EncodedTensor {
  SymbolKind kind = SymbolKind::element;
  uint32_t width = 1;
  uint32_t rows = 0, cols = 0;
  float scale = 1.0f;
  Codebook codebook;
  std::vector<Coord> coords;
  std::vector<uint8_t> payload;
  uint64_t payload_bits = 0;
};

using FreqMap = std::map<std::vector<int16_t>, uint64_t>;

// Optimal prefix code over the symbol histogram. Tree merging breaks
// frequency ties toward the smaller symbol (then toward leaves over merged
// subtrees), making the construction fully deterministic before the codes
// are canonicalized. Counts must be positive and the map non-empty.
Codebook build_codebook(const FreqMap& freqs, SymbolKind kind, uint32_t width);

// Nonzero elements as symbols, row-major coordinate order.
EncodedTensor encode_elementwise(const QMatrix& m);

// 1 x width tiles as symbols (zero-padded at the right edge); tiles that are
// entirely zero are skipped. width == 1 reproduces element-wise statistics.
EncodedTensor encode_vectorwise(const QMatrix& m, uint32_t width);

// Exact reconstruction. Payload bits must decode to exactly coords.size()
// codewords and be fully consumed, otherwise ParseError.
QMatrix decode(const EncodedTensor& e);

}  // namespace wtc
