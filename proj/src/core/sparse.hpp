// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/types.hpp"

namespace wtc {

// Block sparse row: only blocks holding at least one nonzero are stored, in
// row-major block order, zero-padded at the right/bottom edges. row_ptr has
// block_rows()+1 entries; col_idx holds block-column ids strictly increasing
// within each block row.
struct BsrMatrix {
  uint32_t rows = 0, cols = 0;
  uint32_t block_h = 1, block_w = 1;
  float scale = 1.0f;
  std::vector<uint32_t> row_ptr;
  std::vector<uint32_t> col_idx;
  std::vector<int16_t> blocks;  // block_count() * block_elems(), concatenated

  uint32_t block_rows() const;
  uint32_t block_cols() const;
  uint64_t block_count() const { return col_idx.size(); }
  size_t block_elems() const { return size_t(block_h) * block_w; }
};

// Shared-block sparse row: same index arrays as BSR, but value-identical
// blocks are stored once. Each stored block maps to a slot in a reference-
// counted payload store; the serialized/accounted view (1-bit first/repeat
// flags, backward refs into the deduplicated payload array) is derived in
// first-appearance order by canonical().
struct SbsrMatrix {
  uint32_t rows = 0, cols = 0;
  uint32_t block_h = 1, block_w = 1;
  float scale = 1.0f;
  std::vector<uint32_t> row_ptr;
  std::vector<uint32_t> col_idx;

  std::vector<uint32_t> entry_slot;   // per stored block: payload slot id
  std::vector<int16_t> slot_store;    // slot payloads, including freed slots
  std::vector<uint32_t> slot_refs;    // per-slot reference count (0 = free)
  std::vector<uint32_t> free_slots;
  uint64_t live_unique = 0;
  uint64_t build_touches = 0;  // blocks visited by the construction scan

  struct VectorHash {
    size_t operator()(const std::vector<int16_t>& v) const;
  };
  std::unordered_map<std::vector<int16_t>, uint32_t, VectorHash> payload_index;

  uint32_t block_rows() const;
  uint32_t block_cols() const;
  uint64_t block_count() const { return col_idx.size(); }
  uint64_t unique_count() const { return live_unique; }
  uint64_t repeat_count() const { return block_count() - live_unique; }
  size_t block_elems() const { return size_t(block_h) * block_w; }
  std::span<const int16_t> slot_payload(uint32_t slot) const;

  // First-appearance view: flag bit k set <=> stored block k repeats an
  // earlier payload; refs hold, per repeat, the dense unique-array id, which
  // is always smaller than the number of uniques seen so far.
  struct Canonical {
    std::vector<uint8_t> flags;  // packed MSB-first, bit k at flags[k/8] >> (7-k%8)
    std::vector<uint32_t> refs;
    std::vector<int16_t> unique_blocks;
    std::vector<uint32_t> entry_unique;  // per stored block: dense unique id

    bool is_repeat(uint64_t k) const { return (flags[k / 8] >> (7 - k % 8)) & 1; }
  };
  Canonical canonical() const;
};

// Construction. Block dims must be positive; every block with a nonzero is
// stored. to_sbsr makes a single pass over stored blocks (build_touches
// counts them) with one hash lookup each.
BsrMatrix to_bsr(const QMatrix& m, uint32_t block_h, uint32_t block_w);
SbsrMatrix to_sbsr(const QMatrix& m, uint32_t block_h, uint32_t block_w);

// Dense reconstruction with edge padding stripped. Structural corruption
// (index bounds, non-monotone pointers, dead slots) raises ParseError.
QMatrix decode(const BsrMatrix& b);
QMatrix decode(const SbsrMatrix& s);

// Block fetch by block coordinates: stored blocks return their (possibly
// shared) payload through one indirection, unstored in-range coordinates
// return an all-zero block, out-of-range coordinates are an error.
std::vector<int16_t> get_block(const SbsrMatrix& s, uint64_t brow, uint64_t bcol);

// Replaces a stored block's payload in place, re-sharing against the payload
// store: new payloads claim a slot, abandoned payloads are freed once their
// last user departs. The sparsity pattern is immutable, so unstored targets
// and all-zero payloads are errors.
void update_block(SbsrMatrix& s, uint64_t brow, uint64_t bcol,
                  std::span<const int16_t> payload);

// y = dequant(M) * x with float64 accumulation. Each row folds its nonzero
// terms in ascending column order, so the result is bit-identical to a dense
// left-to-right accumulation over the nonzero elements.
std::vector<double> spmv(const BsrMatrix& b, std::span<const double> x);
std::vector<double> spmv(const SbsrMatrix& s, std::span<const double> x);

// Full structural validation (index bounds/order, slot liveness, refcount
// consistency, dedup). decode() runs the cheap subset automatically.
void validate_structure(const BsrMatrix& b);
void validate_structure(const SbsrMatrix& s);

}  // namespace wtc
