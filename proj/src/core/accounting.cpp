// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/accounting.hpp"

#include "core/util.hpp"

namespace wtc {

const char* to_string(WidthPolicy p) {
  return p == WidthPolicy::theoretical ? "theoretical" : "fixed32";
}

WidthPolicy width_policy_from_string(const std::string& s) {
  if (s == "theoretical") return WidthPolicy::theoretical;
  if (s == "fixed32") return WidthPolicy::fixed32;
  throw ArgError("unknown width policy '" + s + "'");
}

uint32_t field_width(WidthPolicy p, uint64_t domain) {
  if (p == WidthPolicy::fixed32) return 32;
  uint32_t w = ceil_log2(domain);
  return w == 0 ? 1 : w;
}

uint64_t SizeBreakdown::component(std::string_view name) const {
  for (const auto& [label, bits] : components)
    if (label == name) return bits;
  throw ArgError("no size component named '" + std::string(name) + "'");
}

namespace {

SizeBreakdown make_breakdown(std::vector<std::pair<std::string, uint64_t>> parts) {
  SizeBreakdown b;
  b.components = std::move(parts);
  for (const auto& [label, bits] : b.components) b.total_bits += bits;
  return b;
}

// Index cost shared by BSR and SBSR: row pointers range over [0, blocks],
// block columns over the block-column grid.
uint64_t index_bits(WidthPolicy p, uint64_t row_ptr_len, uint64_t blocks,
                    uint64_t block_cols) {
  uint64_t w_ptr = field_width(p, blocks + 1);
  uint64_t w_col = field_width(p, block_cols);
  return row_ptr_len * w_ptr + blocks * w_col;
}

}  // namespace

SizeBreakdown size_bsr(const BsrMatrix& b, WidthPolicy p) {
  uint64_t idx = index_bits(p, b.row_ptr.size(), b.block_count(), b.block_cols());
  uint64_t payload = b.block_count() * b.block_elems() * 16;
  return make_breakdown({{"BSR_idx", idx}, {"BSR_blocks", payload}});
}

SizeBreakdown size_sbsr(const SbsrMatrix& s, WidthPolicy p) {
  uint64_t flags = s.block_count();  // one first/repeat bit per stored block
  uint64_t refs = s.repeat_count() * field_width(p, s.unique_count());
  uint64_t idx = index_bits(p, s.row_ptr.size(), s.block_count(), s.block_cols());
  uint64_t uniq = s.unique_count() * s.block_elems() * 16;
  return make_breakdown({{"S_flag", flags},
                         {"S_block_pointer", refs},
                         {"S_idx", idx},
                         {"S_unique_blocks", uniq}});
}

SizeBreakdown size_huffman(const EncodedTensor& e, WidthPolicy p) {
  uint64_t w_row = field_width(p, e.rows);
  uint64_t col_domain =
      e.kind == SymbolKind::vector ? ceil_div(e.cols, e.width) : uint64_t(e.cols);
  uint64_t w_col = field_width(p, col_domain);
  uint64_t idx = uint64_t(e.coords.size()) * (w_row + w_col);

  // Dictionary entries carry the symbol payload, the codeword itself, and an
  // 8-bit length field.
  uint64_t dict = 0;
  uint64_t payload = 0;
  for (const CodeEntry& entry : e.codebook.entries)
    dict += uint64_t(16) * e.width + entry.length + 8;
  payload = e.payload_bits;
  return make_breakdown({{"H_Idx", idx}, {"H_dict", dict}, {"payload", payload}});
}

uint64_t dense_bits(const DenseTensor& t) {
  t.validate();
  return t.element_count() * (t.dtype == Dtype::f32 ? 32 : 16);
}

double cr_ratio(uint64_t numerator_bits, uint64_t denominator_bits) {
  if (denominator_bits == 0) throw ArgError("compaction ratio over a zero-size structure");
  return double(numerator_bits) / double(denominator_bits);
}

double cr_over_bsr(const SizeBreakdown& bsr, const SizeBreakdown& sbsr) {
  return cr_ratio(bsr.total_bits, sbsr.total_bits);
}

std::vector<BreakdownRow> breakdown_report(
    std::span<const std::pair<std::string, SizeBreakdown>> items) {
  std::vector<BreakdownRow> rows;
  for (const auto& [label, breakdown] : items) {
    for (const auto& [component, bits] : breakdown.components) {
      BreakdownRow r;
      r.label = label;
      r.component = component;
      r.bits = bits;
      r.percent =
          breakdown.total_bits == 0 ? 0.0 : 100.0 * double(bits) / double(breakdown.total_bits);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace wtc
