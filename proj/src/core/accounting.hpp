// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/huffman.hpp"
#include "core/sparse.hpp"
#include "core/tensor.hpp"

namespace wtc {

// How wide index-like fields (row pointers, block columns, refs, coords)
// count in the size model. fixed32 is what the serializers actually write;
// theoretical charges ceil(log2(domain)) bits, never less than 1.
enum class WidthPolicy : uint8_t { theoretical, fixed32 };

const char* to_string(WidthPolicy p);
WidthPolicy width_policy_from_string(const std::string& s);

uint32_t field_width(WidthPolicy p, uint64_t domain);

// A size total plus its named components, in a fixed emission order.
// total_bits always equals the component sum.
struct SizeBreakdown {
  uint64_t total_bits = 0;
  std::vector<std::pair<std::string, uint64_t>> components;

  uint64_t component(std::string_view name) const;  // ArgError when absent
};

// BSR_idx (row pointers + block columns) + BSR_blocks (16-bit payload words).
SizeBreakdown size_bsr(const BsrMatrix& b, WidthPolicy p);

// S_flag (1 bit per stored block) + S_block_pointer (one ref per repeat)
// + S_idx (as BSR) + S_unique_blocks (deduplicated payload words).
SizeBreakdown size_sbsr(const SbsrMatrix& s, WidthPolicy p);

// H_Idx (coordinate pairs) + H_dict (per entry: symbol payload, code bits,
// 8-bit length field) + payload (sum of code length x frequency).
SizeBreakdown size_huffman(const EncodedTensor& e, WidthPolicy p);

// Baseline dense bits: element count x 32 (float32) or x 16 (q16).
uint64_t dense_bits(const DenseTensor& t);

// Size ratios; denominators must be positive.
double cr_over_bsr(const SizeBreakdown& bsr, const SizeBreakdown& sbsr);
double cr_ratio(uint64_t numerator_bits, uint64_t denominator_bits);

struct BreakdownRow {
  std::string label;
  std::string component;
  uint64_t bits = 0;
  double percent = 0.0;  // of the item's total
};

std::vector<BreakdownRow> breakdown_report(
    std::span<const std::pair<std::string, SizeBreakdown>> items);

}  // namespace wtc
