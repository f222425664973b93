// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/accounting.hpp"
#include "core/huffman.hpp"
#include "core/reduce.hpp"
#include "core/tensor.hpp"

namespace wtc {

// Occurrence count of every nonzero 1 x width block under the zero-padded
// tiling, keyed by payload. Counts sum to the number of stored blocks.
FreqMap block_histogram(const QMatrix& m, uint32_t width);

struct WidthCandidate {
  uint32_t width = 0;
  uint64_t stored_blocks = 0;
  uint64_t unique_blocks = 0;
  SizeBreakdown size;
};

// One shared-block structure per requested width, in request order.
// best_width minimizes total bits, ties resolved toward the smaller width.
struct SweepResult {
  std::string layer;
  std::vector<WidthCandidate> candidates;
  uint32_t best_width = 0;
};

SweepResult sweep_block_width(const QMatrix& m, const std::vector<uint32_t>& widths,
                              WidthPolicy policy, const std::string& layer = "");

struct RoundingComparison {
  std::string layer;
  uint32_t width = 0;
  uint64_t unique_truncate = 0;
  uint64_t unique_nearest = 0;
  uint64_t total_bits_truncate = 0;
  uint64_t total_bits_nearest = 0;
};

// Quantizes a float32 tensor under both rounding modes on the same grid and
// sizes the two resulting shared-block structures. The totals are reported,
// never asserted close; how near they land is a property of the data.
RoundingComparison compare_rounding(const DenseTensor& t, const QuantGrid& grid,
                                    uint32_t width, WidthPolicy policy);

// How the grid step is chosen when quantizing float input: from the value
// range (automatic), from the pruning threshold, or given outright.
enum class ScaleMode : uint8_t { automatic, threshold, explicit_value };

struct QuantOpts {
  uint32_t bits = 16;
  ScaleMode scale_mode = ScaleMode::automatic;
  float scale = 0.0f;  // explicit_value mode only
  Rounding rounding = Rounding::nearest;
};

// Materializes the grid for a (possibly pruned) float tensor. threshold mode
// requires a positive-threshold prune spec to borrow the step from.
QuantGrid resolve_grid(const DenseTensor& t, const QuantOpts& opts,
                       const std::optional<PruneSpec>& prune_spec);

// Everything one layer contributes to a Table-style report: pipeline stats
// plus the four format size models at one block width.
struct LayerReport {
  std::string name;
  LayerKind kind = LayerKind::fully_connected;
  uint32_t rows = 0, cols = 0;
  uint32_t width = 0;
  uint64_t elements = 0;
  uint64_t nonzeros = 0;         // after the full pipeline
  uint64_t zeroed_by_quant = 0;  // survived pruning, landed on grid zero
  double sparsity = 0.0;
  uint64_t dense_total_bits = 0;  // at the input dtype's element width
  SizeBreakdown bsr, sbsr, ehuff, vhuff;
  std::optional<double> cr_over_bsr;        // bsr / sbsr
  std::optional<double> cr_elem_over_vec;   // ehuff / vhuff
  std::optional<double> cr_elem_over_sbsr;  // ehuff / sbsr
};

// Full pipeline on one tensor: optional prune and quantize for float32 input
// (q16 input is taken as-is and must not carry a prune spec), then BSR, SBSR
// and both entropy codings with size models at the given block width. Ratio
// fields are set only when both totals are positive.
LayerReport analyze_layer(const DenseTensor& t, const std::optional<PruneSpec>& prune_spec,
                          const QuantOpts& quant, uint32_t width, WidthPolicy policy);

}  // namespace wtc
