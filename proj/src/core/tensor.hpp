// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace wtc {

// A named n-dimensional weight tensor, row-major. Exactly one of the value
// arrays is populated, selected by dtype. q16 tensors carry one float32 grid
// step; their integers *are* the grid coordinates, so "every value lies on
// the grid" holds by representation.
struct DenseTensor {
  std::string name;
  std::vector<uint64_t> shape;  // extents, all >= 1
  Dtype dtype = Dtype::f32;
  LayerKind kind = LayerKind::fully_connected;
  std::vector<float> f32;
  std::vector<int16_t> q16;
  float scale = 1.0f;  // grid step, q16 only (1.0 placeholder for f32)

  uint64_t element_count() const;

  // Throws ArgError when the invariants above do not hold.
  void validate() const;
};

// Rows/cols of the 2D view: all leading extents collapse into rows and the
// last extent becomes the width, so a [oc, ic, kh, kw] kernel flattens to an
// (oc*ic*kh) x kw matrix and an FC [rows, cols] tensor passes through.
// Rank-1 tensors are rejected.
std::pair<uint64_t, uint64_t> flatten_dims(const std::vector<uint64_t>& shape);

// 2D views over a tensor's storage (copies; tensors stay immutable).
QMatrix flatten_to_matrix(const DenseTensor& t);       // requires dtype q16
FMatrix flatten_to_matrix_f32(const DenseTensor& t);   // requires dtype f32

// Rebuilds a q16 tensor from a matrix, restoring an n-d shape whose flatten
// matches the matrix extents. Inverse of flatten_to_matrix for q16 input.
DenseTensor tensor_from_matrix(const QMatrix& m, const std::string& name,
                               const std::vector<uint64_t>& shape, LayerKind kind);

}  // namespace wtc
