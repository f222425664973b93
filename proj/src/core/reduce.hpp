// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "core/tensor.hpp"

namespace wtc {

enum class PruneMode : uint8_t { threshold, target_sparsity };

struct PruneSpec {
  PruneMode mode = PruneMode::threshold;
  float threshold = 0.0f;        // magnitude cutoff, mode == threshold
  double target_sparsity = 0.0;  // zero fraction to reach, mode == target_sparsity

  static PruneSpec by_threshold(float t);
  static PruneSpec by_target(double s);
  void validate() const;
};

enum class Rounding : uint8_t { truncate, nearest };

const char* to_string(Rounding r);
Rounding rounding_from_string(const std::string& s);

// A signed fixed-point grid: q in [-(2^(bits-1)), 2^(bits-1) - 1] with real
// value q * scale. bits <= 16 so values always fit int16 storage.
struct QuantGrid {
  uint32_t bits = 16;
  float scale = 1.0f;
  Rounding rounding = Rounding::nearest;

  void validate() const;
  int32_t qmin() const { return -(int32_t(1) << (bits - 1)); }
  int32_t qmax() const { return (int32_t(1) << (bits - 1)) - 1; }
};

// Magnitude pruning on a float32 tensor. threshold mode zeroes |v| < t;
// target mode zeroes the ceil(s*n) smallest magnitudes, ties resolved toward
// the lower flat index. Both are idempotent.
DenseTensor prune(const DenseTensor& t, const PruneSpec& spec);

// float32 -> q16 on the given grid. truncate rounds toward zero, nearest
// rounds half to even; zero always maps to zero. Values whose quantized
// integer leaves the grid raise RangeError listing the offending indices.
// A q16 input re-quantized with its own grid is returned unchanged; any
// other grid on q16 input is an error.
DenseTensor quantize(const DenseTensor& t, const QuantGrid& grid);

// max|v| / (2^(bits-1) - 1); 1.0 for an all-zero tensor.
float default_scale(const DenseTensor& t, uint32_t bits);

}  // namespace wtc
