// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace wtc {

PruneSpec PruneSpec::by_threshold(float t) {
  PruneSpec s;
  s.mode = PruneMode::threshold;
  s.threshold = t;
  return s;
}

PruneSpec PruneSpec::by_target(double s) {
  PruneSpec p;
  p.mode = PruneMode::target_sparsity;
  p.target_sparsity = s;
  return p;
}

void PruneSpec::validate() const {
  if (mode == PruneMode::threshold) {
    if (!(threshold >= 0.0f) || !std::isfinite(threshold))
      throw ArgError("prune threshold must be finite and >= 0");
  } else {
    if (!(target_sparsity >= 0.0 && target_sparsity <= 1.0))
      throw ArgError("target sparsity must lie in [0, 1]");
  }
}

const char* to_string(Rounding r) {
  return r == Rounding::truncate ? "truncate" : "nearest";
}

Rounding rounding_from_string(const std::string& s) {
  if (s == "truncate") return Rounding::truncate;
  if (s == "nearest") return Rounding::nearest;
  throw ArgError("unknown rounding mode '" + s + "' (expected truncate or nearest)");
}

void QuantGrid::validate() const {
  if (bits < 2 || bits > 16)
    throw ArgError("grid bits must lie in [2, 16], got " + std::to_string(bits));
  if (!(scale > 0.0f) || !std::isfinite(scale))
    throw ArgError("grid scale must be finite and positive");
}

DenseTensor prune(const DenseTensor& t, const PruneSpec& spec) {
  t.validate();
  spec.validate();
  if (t.dtype != Dtype::f32)
    throw ArgError("prune expects a float32 tensor, got '" + t.name + "' as " +
                   to_string(t.dtype));

  DenseTensor out = t;
  if (spec.mode == PruneMode::threshold) {
    for (float& v : out.f32)
      if (std::fabs(v) < spec.threshold) v = 0.0f;
    return out;
  }

  // ceil(s*n) smallest magnitudes go to zero; (magnitude, index) ordering
  // makes the tie rule explicit and the whole pass deterministic.
  const size_t n = out.f32.size();
  const size_t k = static_cast<size_t>(std::ceil(spec.target_sparsity * double(n)));
  if (k == 0) return out;
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    float ma = std::fabs(out.f32[a]);
    float mb = std::fabs(out.f32[b]);
    return ma != mb ? ma < mb : a < b;
  });
  for (size_t i = 0; i < k && i < n; ++i) out.f32[idx[i]] = 0.0f;
  return out;
}

namespace {

// Round-half-to-even on an exact double ratio.
double round_half_even(double r) {
  double f = std::floor(r);
  double d = r - f;
  if (d > 0.5) return f + 1.0;
  if (d == 0.5 && std::fmod(f, 2.0) != 0.0) return f + 1.0;
  return f;
}

}  // namespace

DenseTensor quantize(const DenseTensor& t, const QuantGrid& grid) {
  t.validate();
  grid.validate();

  if (t.dtype == Dtype::q16) {
    // Already on a grid. Identical grid: identity (exactly idempotent).
    // A different grid cannot be honored exactly, so refuse it.
    if (t.scale == grid.scale) return t;
    throw ArgError("tensor '" + t.name +
                   "' is already q16 with a different scale; re-quantization "
                   "to a new grid is not supported");
  }

  DenseTensor out;
  out.name = t.name;
  out.shape = t.shape;
  out.kind = t.kind;
  out.dtype = Dtype::q16;
  out.scale = grid.scale;
  out.q16.resize(t.f32.size());

  std::vector<size_t> overflow;
  size_t overflow_total = 0;
  for (size_t i = 0; i < t.f32.size(); ++i) {
    double r = double(t.f32[i]) / double(grid.scale);
    double q = grid.rounding == Rounding::truncate ? std::trunc(r) : round_half_even(r);
    if (q < double(grid.qmin()) || q > double(grid.qmax())) {
      ++overflow_total;
      if (overflow.size() < 8) overflow.push_back(i);
      continue;
    }
    out.q16[i] = static_cast<int16_t>(q);
  }
  if (overflow_total > 0) {
    std::ostringstream msg;
    msg << "tensor '" << t.name << "' overflows the " << grid.bits
        << "-bit grid (scale " << grid.scale << ") at " << overflow_total
        << " element(s), indices";
    for (size_t i : overflow) msg << ' ' << i;
    if (overflow_total > overflow.size()) msg << " ...";
    throw RangeError(msg.str());
  }
  out.validate();
  return out;
}

float default_scale(const DenseTensor& t, uint32_t bits) {
  t.validate();
  if (bits < 2 || bits > 16) throw ArgError("default_scale: bits must lie in [2, 16]");
  if (t.dtype != Dtype::f32) throw ArgError("default_scale expects a float32 tensor");
  float maxabs = 0.0f;
  for (float v : t.f32) maxabs = std::max(maxabs, std::fabs(v));
  if (maxabs == 0.0f) return 1.0f;
  return maxabs / float((uint32_t(1) << (bits - 1)) - 1);
}

}  // namespace wtc
