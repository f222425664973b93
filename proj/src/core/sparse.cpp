// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/sparse.hpp"

#include <algorithm>
#include <cstring>

#include "core/util.hpp"

namespace wtc {
namespace {

void check_block_dims(const QMatrix& m, uint32_t bh, uint32_t bw) {
  if (m.rows == 0 || m.cols == 0) throw ArgError("matrix extents must be positive");
  if (m.values.size() != size_t(m.rows) * m.cols)
    throw ArgError("matrix storage does not match its extents");
  if (bh == 0 || bw == 0) throw ArgError("block dims must be positive");
}

// Copies block (br, bc) out of m, zero-padding past the right/bottom edge.
// Returns true when any element is nonzero.
bool extract_block(const QMatrix& m, uint64_t br, uint64_t bc, uint32_t bh,
                   uint32_t bw, int16_t* out) {
  bool nonzero = false;
  for (uint32_t i = 0; i < bh; ++i) {
    uint64_t r = br * bh + i;
    for (uint32_t j = 0; j < bw; ++j) {
      uint64_t c = bc * bw + j;
      int16_t v = (r < m.rows && c < m.cols) ? m.values[r * m.cols + c] : int16_t(0);
      out[i * bw + j] = v;
      nonzero |= (v != 0);
    }
  }
  return nonzero;
}

void place_block(QMatrix& m, uint64_t br, uint64_t bc, uint32_t bh, uint32_t bw,
                 const int16_t* payload) {
  for (uint32_t i = 0; i < bh; ++i) {
    uint64_t r = br * bh + i;
    if (r >= m.rows) break;
    for (uint32_t j = 0; j < bw; ++j) {
      uint64_t c = bc * bw + j;
      if (c >= m.cols) break;
      m.values[r * m.cols + c] = payload[i * bw + j];
    }
  }
}

void check_index_arrays(const char* what, uint32_t nbr, uint32_t nbc,
                        const std::vector<uint32_t>& row_ptr,
                        const std::vector<uint32_t>& col_idx) {
  if (row_ptr.size() != size_t(nbr) + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != col_idx.size())
    throw ParseError(std::string(what) + ": row pointer array is inconsistent");
  for (size_t r = 0; r < size_t(nbr); ++r) {
    if (row_ptr[r] > row_ptr[r + 1])
      throw ParseError(std::string(what) + ": row pointers are not monotone");
    for (uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= nbc)
        throw ParseError(std::string(what) + ": block column out of range");
      if (k > row_ptr[r] && col_idx[k - 1] >= col_idx[k])
        throw ParseError(std::string(what) + ": block columns not strictly increasing");
    }
  }
}

// Shared block scan driving both builders: calls sink(br, bc, payload) for
// each nonzero block in row-major block order.
template <typename Sink>
void scan_blocks(const QMatrix& m, uint32_t bh, uint32_t bw, std::vector<uint32_t>& row_ptr,
                 std::vector<uint32_t>& col_idx, Sink&& sink) {
  uint32_t nbr = static_cast<uint32_t>(ceil_div(m.rows, bh));
  uint32_t nbc = static_cast<uint32_t>(ceil_div(m.cols, bw));
  row_ptr.assign(size_t(nbr) + 1, 0);
  std::vector<int16_t> scratch(size_t(bh) * bw);
  for (uint32_t br = 0; br < nbr; ++br) {
    for (uint32_t bc = 0; bc < nbc; ++bc) {
      if (!extract_block(m, br, bc, bh, bw, scratch.data())) continue;
      col_idx.push_back(bc);
      sink(br, bc, scratch);
    }
    row_ptr[br + 1] = static_cast<uint32_t>(col_idx.size());
  }
}

// Binary search for block column bc within a block row's entry range.
// Returns the entry id or UINT64_MAX.
uint64_t find_entry(const std::vector<uint32_t>& row_ptr, const std::vector<uint32_t>& col_idx,
                    uint64_t brow, uint64_t bcol) {
  auto first = col_idx.begin() + row_ptr[brow];
  auto last = col_idx.begin() + row_ptr[brow + 1];
  auto it = std::lower_bound(first, last, static_cast<uint32_t>(bcol));
  if (it == last || *it != bcol) return UINT64_MAX;
  return static_cast<uint64_t>(it - col_idx.begin());
}

}  // namespace

size_t SbsrMatrix::VectorHash::operator()(const std::vector<int16_t>& v) const {
  // FNV-1a over the payload bytes.
  uint64_t h = 1469598103934665603ull;
  for (int16_t x : v) {
    uint16_t u = static_cast<uint16_t>(x);
    h = (h ^ (u & 0xff)) * 1099511628211ull;
    h = (h ^ (u >> 8)) * 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

uint32_t BsrMatrix::block_rows() const { return static_cast<uint32_t>(ceil_div(rows, block_h)); }
uint32_t BsrMatrix::block_cols() const { return static_cast<uint32_t>(ceil_div(cols, block_w)); }
uint32_t SbsrMatrix::block_rows() const { return static_cast<uint32_t>(ceil_div(rows, block_h)); }
uint32_t SbsrMatrix::block_cols() const { return static_cast<uint32_t>(ceil_div(cols, block_w)); }

std::span<const int16_t> SbsrMatrix::slot_payload(uint32_t slot) const {
  return std::span<const int16_t>(slot_store.data() + size_t(slot) * block_elems(),
                                  block_elems());
}

BsrMatrix to_bsr(const QMatrix& m, uint32_t block_h, uint32_t block_w) {
  check_block_dims(m, block_h, block_w);
  BsrMatrix b;
  b.rows = m.rows;
  b.cols = m.cols;
  b.block_h = block_h;
  b.block_w = block_w;
  b.scale = m.scale;
  scan_blocks(m, block_h, block_w, b.row_ptr, b.col_idx,
              [&](uint32_t, uint32_t, const std::vector<int16_t>& payload) {
                b.blocks.insert(b.blocks.end(), payload.begin(), payload.end());
              });
  return b;
}

SbsrMatrix to_sbsr(const QMatrix& m, uint32_t block_h, uint32_t block_w) {
  check_block_dims(m, block_h, block_w);
  SbsrMatrix s;
  s.rows = m.rows;
  s.cols = m.cols;
  s.block_h = block_h;
  s.block_w = block_w;
  s.scale = m.scale;
  scan_blocks(m, block_h, block_w, s.row_ptr, s.col_idx,
              [&](uint32_t, uint32_t, const std::vector<int16_t>& payload) {
                ++s.build_touches;
                auto [it, inserted] =
                    s.payload_index.try_emplace(payload, uint32_t(s.slot_refs.size()));
                if (inserted) {
                  s.slot_store.insert(s.slot_store.end(), payload.begin(), payload.end());
                  s.slot_refs.push_back(1);
                  ++s.live_unique;
                } else {
                  ++s.slot_refs[it->second];
                }
                s.entry_slot.push_back(it->second);
              });
  return s;
}

SbsrMatrix::Canonical SbsrMatrix::canonical() const {
  Canonical c;
  c.flags.assign(ceil_div(block_count(), 8), 0);
  c.refs.reserve(repeat_count());
  c.unique_blocks.reserve(live_unique * block_elems());
  c.entry_unique.resize(block_count());
  std::unordered_map<uint32_t, uint32_t> dense_id;  // slot -> unique id
  dense_id.reserve(size_t(live_unique) * 2);
  for (uint64_t k = 0; k < block_count(); ++k) {
    uint32_t slot = entry_slot[k];
    auto it = dense_id.find(slot);
    if (it == dense_id.end()) {
      uint32_t id = static_cast<uint32_t>(dense_id.size());
      dense_id.emplace(slot, id);
      auto payload = slot_payload(slot);
      c.unique_blocks.insert(c.unique_blocks.end(), payload.begin(), payload.end());
      c.entry_unique[k] = id;
    } else {
      c.flags[k / 8] |= uint8_t(1u << (7 - k % 8));
      c.refs.push_back(it->second);
      c.entry_unique[k] = it->second;
    }
  }
  return c;
}

void validate_structure(const BsrMatrix& b) {
  if (b.block_h == 0 || b.block_w == 0) throw ParseError("bsr: block dims must be positive");
  check_index_arrays("bsr", b.block_rows(), b.block_cols(), b.row_ptr, b.col_idx);
  if (b.blocks.size() != b.block_count() * b.block_elems())
    throw ParseError("bsr: payload array does not match the block count");
  for (uint64_t k = 0; k < b.block_count(); ++k) {
    const int16_t* p = b.blocks.data() + k * b.block_elems();
    bool nonzero = false;
    for (size_t i = 0; i < b.block_elems(); ++i) nonzero |= (p[i] != 0);
    if (!nonzero) throw ParseError("bsr: stored block " + std::to_string(k) + " is all zero");
  }
}

void validate_structure(const SbsrMatrix& s) {
  if (s.block_h == 0 || s.block_w == 0) throw ParseError("sbsr: block dims must be positive");
  check_index_arrays("sbsr", s.block_rows(), s.block_cols(), s.row_ptr, s.col_idx);
  if (s.entry_slot.size() != s.block_count())
    throw ParseError("sbsr: slot table does not match the block count");
  if (s.slot_store.size() != s.slot_refs.size() * s.block_elems())
    throw ParseError("sbsr: payload store does not match the slot count");

  std::vector<uint32_t> usage(s.slot_refs.size(), 0);
  for (uint64_t k = 0; k < s.block_count(); ++k) {
    uint32_t slot = s.entry_slot[k];
    if (slot >= s.slot_refs.size() || s.slot_refs[slot] == 0)
      throw ParseError("sbsr: stored block " + std::to_string(k) +
                       " references a missing payload");
    ++usage[slot];
  }
  uint64_t live = 0;
  std::unordered_map<std::vector<int16_t>, uint32_t, SbsrMatrix::VectorHash> seen;
  for (uint32_t slot = 0; slot < s.slot_refs.size(); ++slot) {
    if (usage[slot] != s.slot_refs[slot])
      throw ParseError("sbsr: slot " + std::to_string(slot) + " refcount is stale");
    if (s.slot_refs[slot] == 0) continue;
    ++live;
    auto payload = s.slot_payload(slot);
    std::vector<int16_t> key(payload.begin(), payload.end());
    bool nonzero = false;
    for (int16_t v : key) nonzero |= (v != 0);
    if (!nonzero) throw ParseError("sbsr: slot " + std::to_string(slot) + " is all zero");
    if (!seen.emplace(std::move(key), slot).second)
      throw ParseError("sbsr: payload store holds duplicate blocks");
  }
  if (live != s.live_unique) throw ParseError("sbsr: live unique count is stale");
}

QMatrix decode(const BsrMatrix& b) {
  check_index_arrays("bsr", b.block_rows(), b.block_cols(), b.row_ptr, b.col_idx);
  if (b.blocks.size() != b.block_count() * b.block_elems())
    throw ParseError("bsr: payload array does not match the block count");
  QMatrix m;
  m.rows = b.rows;
  m.cols = b.cols;
  m.scale = b.scale;
  m.values.assign(size_t(b.rows) * b.cols, 0);
  for (uint32_t br = 0; br < b.block_rows(); ++br)
    for (uint32_t k = b.row_ptr[br]; k < b.row_ptr[br + 1]; ++k)
      place_block(m, br, b.col_idx[k], b.block_h, b.block_w,
                  b.blocks.data() + size_t(k) * b.block_elems());
  return m;
}

QMatrix decode(const SbsrMatrix& s) {
  check_index_arrays("sbsr", s.block_rows(), s.block_cols(), s.row_ptr, s.col_idx);
  if (s.entry_slot.size() != s.block_count())
    throw ParseError("sbsr: slot table does not match the block count");
  QMatrix m;
  m.rows = s.rows;
  m.cols = s.cols;
  m.scale = s.scale;
  m.values.assign(size_t(s.rows) * s.cols, 0);
  for (uint32_t br = 0; br < s.block_rows(); ++br)
    for (uint32_t k = s.row_ptr[br]; k < s.row_ptr[br + 1]; ++k) {
      uint32_t slot = s.entry_slot[k];
      if (slot >= s.slot_refs.size() || s.slot_refs[slot] == 0)
        throw ParseError("sbsr: stored block " + std::to_string(k) +
                         " references a missing payload");
      place_block(m, br, s.col_idx[k], s.block_h, s.block_w, s.slot_payload(slot).data());
    }
  return m;
}

std::vector<int16_t> get_block(const SbsrMatrix& s, uint64_t brow, uint64_t bcol) {
  if (brow >= s.block_rows() || bcol >= s.block_cols())
    throw ArgError("get_block: block (" + std::to_string(brow) + ", " + std::to_string(bcol) +
                   ") is outside the block grid");
  uint64_t k = find_entry(s.row_ptr, s.col_idx, brow, bcol);
  if (k == UINT64_MAX) return std::vector<int16_t>(s.block_elems(), 0);
  auto payload = s.slot_payload(s.entry_slot[k]);
  return std::vector<int16_t>(payload.begin(), payload.end());
}

void update_block(SbsrMatrix& s, uint64_t brow, uint64_t bcol,
                  std::span<const int16_t> payload) {
  if (brow >= s.block_rows() || bcol >= s.block_cols())
    throw ArgError("update_block: block (" + std::to_string(brow) + ", " +
                   std::to_string(bcol) + ") is outside the block grid");
  if (payload.size() != s.block_elems())
    throw ArgError("update_block: payload has " + std::to_string(payload.size()) +
                   " elements, expected " + std::to_string(s.block_elems()));
  bool nonzero = false;
  for (int16_t v : payload) nonzero |= (v != 0);
  if (!nonzero)
    throw ArgError("update_block: all-zero payloads would change the sparsity "
                   "pattern, which is immutable");
  uint64_t k = find_entry(s.row_ptr, s.col_idx, brow, bcol);
  if (k == UINT64_MAX)
    throw ArgError("update_block: block (" + std::to_string(brow) + ", " +
                   std::to_string(bcol) + ") is not stored and blocks cannot be inserted");

  const uint32_t old_slot = s.entry_slot[k];
  std::vector<int16_t> key(payload.begin(), payload.end());
  auto old_payload = s.slot_payload(old_slot);
  if (std::equal(key.begin(), key.end(), old_payload.begin())) return;

  auto it = s.payload_index.find(key);
  uint32_t new_slot;
  if (it != s.payload_index.end()) {
    new_slot = it->second;
    ++s.slot_refs[new_slot];
  } else if (s.slot_refs[old_slot] == 1) {
    // Sole user: rewrite the slot in place and re-key the index.
    std::vector<int16_t> old_key(old_payload.begin(), old_payload.end());
    s.payload_index.erase(old_key);
    std::copy(key.begin(), key.end(), s.slot_store.begin() + size_t(old_slot) * s.block_elems());
    s.payload_index.emplace(std::move(key), old_slot);
    return;
  } else {
    if (!s.free_slots.empty()) {
      new_slot = s.free_slots.back();
      s.free_slots.pop_back();
      std::copy(key.begin(), key.end(),
                s.slot_store.begin() + size_t(new_slot) * s.block_elems());
    } else {
      new_slot = static_cast<uint32_t>(s.slot_refs.size());
      s.slot_store.insert(s.slot_store.end(), key.begin(), key.end());
      s.slot_refs.push_back(0);
    }
    s.slot_refs[new_slot] = 1;
    ++s.live_unique;
    s.payload_index.emplace(std::move(key), new_slot);
  }
  s.entry_slot[k] = new_slot;

  // Release the abandoned payload; free it once nobody shares it.
  if (--s.slot_refs[old_slot] == 0) {
    std::vector<int16_t> old_key(old_payload.begin(), old_payload.end());
    s.payload_index.erase(old_key);
    s.free_slots.push_back(old_slot);
    --s.live_unique;
  }
}

namespace {

// One spmv skeleton for both formats; Payload maps an entry id to its block.
template <typename Payload>
std::vector<double> spmv_impl(uint32_t rows, uint32_t cols, uint32_t bh, uint32_t bw,
                              float scale, const std::vector<uint32_t>& row_ptr,
                              const std::vector<uint32_t>& col_idx, uint32_t nbr,
                              std::span<const double> x, Payload&& payload_of) {
  if (x.size() != cols)
    throw ArgError("spmv: vector has " + std::to_string(x.size()) + " entries, expected " +
                   std::to_string(cols));
  std::vector<double> y(rows, 0.0);
  for (uint32_t br = 0; br < nbr; ++br) {
    for (uint32_t k = row_ptr[br]; k < row_ptr[br + 1]; ++k) {
      const int16_t* p = payload_of(k);
      uint64_t c0 = uint64_t(col_idx[k]) * bw;
      for (uint32_t i = 0; i < bh; ++i) {
        uint64_t r = uint64_t(br) * bh + i;
        if (r >= rows) break;
        // Terms are folded straight into y[r] in ascending column order; a
        // per-block partial sum would reassociate the additions and break
        // bit-equality with a dense left-to-right accumulation. Zero elements
        // are skipped so the term sequence is exactly "every nonzero in
        // ascending column order" regardless of which blocks store them.
        for (uint32_t j = 0; j < bw; ++j) {
          uint64_t c = c0 + j;
          if (c >= cols) break;
          if (p[i * bw + j] != 0) y[r] += double(dequant(p[i * bw + j], scale)) * x[c];
        }
      }
    }
  }
  return y;
}

}  // namespace

std::vector<double> spmv(const BsrMatrix& b, std::span<const double> x) {
  check_index_arrays("bsr", b.block_rows(), b.block_cols(), b.row_ptr, b.col_idx);
  return spmv_impl(b.rows, b.cols, b.block_h, b.block_w, b.scale, b.row_ptr, b.col_idx,
                   b.block_rows(), x,
                   [&](uint32_t k) { return b.blocks.data() + size_t(k) * b.block_elems(); });
}

std::vector<double> spmv(const SbsrMatrix& s, std::span<const double> x) {
  check_index_arrays("sbsr", s.block_rows(), s.block_cols(), s.row_ptr, s.col_idx);
  return spmv_impl(s.rows, s.cols, s.block_h, s.block_w, s.scale, s.row_ptr, s.col_idx,
                   s.block_rows(), x,
                   [&](uint32_t k) { return s.slot_payload(s.entry_slot[k]).data(); });
}

}  // namespace wtc
