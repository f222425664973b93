// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/sweep.hpp"

#include <algorithm>

#include "core/sparse.hpp"
#include "core/util.hpp"

namespace wtc {
namespace {

uint64_t count_nonzero(const std::vector<int16_t>& v) {
  return uint64_t(std::count_if(v.begin(), v.end(), [](int16_t q) { return q != 0; }));
}

uint64_t count_nonzero(const std::vector<float>& v) {
  return uint64_t(std::count_if(v.begin(), v.end(), [](float f) { return f != 0.0f; }));
}

std::optional<double> ratio_or_none(uint64_t num, uint64_t den) {
  if (num == 0 || den == 0) return std::nullopt;
  return cr_ratio(num, den);
}

}  // namespace

FreqMap block_histogram(const QMatrix& m, uint32_t width) {
  if (width == 0) throw ArgError("block width must be positive");
  FreqMap freqs;
  std::vector<int16_t> tile(width);
  uint64_t tiles_per_row = ceil_div(m.cols, width);
  for (uint32_t r = 0; r < m.rows; ++r) {
    for (uint64_t b = 0; b < tiles_per_row; ++b) {
      bool any = false;
      for (uint32_t j = 0; j < width; ++j) {
        uint64_t c = b * width + j;
        int16_t q = c < m.cols ? m.at(r, uint32_t(c)) : int16_t(0);
        tile[j] = q;
        any = any || q != 0;
      }
      if (any) ++freqs[tile];
    }
  }
  return freqs;
}

SweepResult sweep_block_width(const QMatrix& m, const std::vector<uint32_t>& widths,
                              WidthPolicy policy, const std::string& layer) {
  if (widths.empty()) throw ArgError("sweep needs at least one block width");
  SweepResult out;
  out.layer = layer;
  out.candidates.reserve(widths.size());
  for (uint32_t w : widths) {
    SbsrMatrix s = to_sbsr(m, 1, w);
    WidthCandidate c;
    c.width = w;
    c.stored_blocks = s.block_count();
    c.unique_blocks = s.unique_count();
    c.size = size_sbsr(s, policy);
    out.candidates.push_back(std::move(c));
  }
  const WidthCandidate* best = &out.candidates.front();
  for (const WidthCandidate& c : out.candidates) {
    if (c.size.total_bits < best->size.total_bits ||
        (c.size.total_bits == best->size.total_bits && c.width < best->width))
      best = &c;
  }
  out.best_width = best->width;
  return out;
}

RoundingComparison compare_rounding(const DenseTensor& t, const QuantGrid& grid,
                                    uint32_t width, WidthPolicy policy) {
  if (t.dtype != Dtype::f32)
    throw ArgError("tensor '" + t.name + "' is not float32; rounding modes only differ on float input");
  grid.validate();
  RoundingComparison out;
  out.layer = t.name;
  out.width = width;
  for (Rounding mode : {Rounding::truncate, Rounding::nearest}) {
    QuantGrid g = grid;
    g.rounding = mode;
    SbsrMatrix s = to_sbsr(flatten_to_matrix(quantize(t, g)), 1, width);
    uint64_t total = size_sbsr(s, policy).total_bits;
    if (mode == Rounding::truncate) {
      out.unique_truncate = s.unique_count();
      out.total_bits_truncate = total;
    } else {
      out.unique_nearest = s.unique_count();
      out.total_bits_nearest = total;
    }
  }
  return out;
}

QuantGrid resolve_grid(const DenseTensor& t, const QuantOpts& opts,
                       const std::optional<PruneSpec>& prune_spec) {
  QuantGrid grid;
  grid.bits = opts.bits;
  grid.rounding = opts.rounding;
  switch (opts.scale_mode) {
    case ScaleMode::automatic:
      grid.scale = default_scale(t, opts.bits);
      break;
    case ScaleMode::threshold:
      if (!prune_spec || prune_spec->mode != PruneMode::threshold || prune_spec->threshold <= 0.0f)
        throw ArgError("scale mode 'threshold' needs a positive pruning threshold");
      grid.scale = prune_spec->threshold;
      break;
    case ScaleMode::explicit_value:
      if (!(opts.scale > 0.0f)) throw ArgError("explicit scale must be positive");
      grid.scale = opts.scale;
      break;
  }
  grid.validate();
  return grid;
}

LayerReport analyze_layer(const DenseTensor& t, const std::optional<PruneSpec>& prune_spec,
                          const QuantOpts& quant, uint32_t width, WidthPolicy policy) {
  if (width == 0) throw ArgError("block width must be positive");
  LayerReport r;
  r.name = t.name;
  r.kind = t.kind;
  r.width = width;
  r.elements = t.element_count();
  r.dense_total_bits = dense_bits(t);

  DenseTensor work = t;
  uint64_t nz_before_quant;
  if (t.dtype == Dtype::f32) {
    if (prune_spec) work = prune(work, *prune_spec);
    nz_before_quant = count_nonzero(work.f32);
    work = quantize(work, resolve_grid(work, quant, prune_spec));
  } else {
    if (prune_spec)
      throw ArgError("tensor '" + t.name + "' is already q16; pruning needs float32 input");
    nz_before_quant = count_nonzero(work.q16);
  }

  QMatrix m = flatten_to_matrix(work);
  r.rows = m.rows;
  r.cols = m.cols;
  r.nonzeros = count_nonzero(m.values);
  r.zeroed_by_quant = nz_before_quant - r.nonzeros;
  r.sparsity = 1.0 - double(r.nonzeros) / double(r.elements);

  r.bsr = size_bsr(to_bsr(m, 1, width), policy);
  r.sbsr = size_sbsr(to_sbsr(m, 1, width), policy);
  r.ehuff = size_huffman(encode_elementwise(m), policy);
  r.vhuff = size_huffman(encode_vectorwise(m, width), policy);

  r.cr_over_bsr = ratio_or_none(r.bsr.total_bits, r.sbsr.total_bits);
  r.cr_elem_over_vec = ratio_or_none(r.ehuff.total_bits, r.vhuff.total_bits);
  r.cr_elem_over_sbsr = ratio_or_none(r.ehuff.total_bits, r.sbsr.total_bits);
  return r;
}

}  // namespace wtc
