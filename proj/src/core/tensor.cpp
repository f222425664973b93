// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/tensor.hpp"

#include <limits>

namespace wtc {

const char* to_string(Dtype d) { return d == Dtype::f32 ? "float32" : "q16"; }

const char* to_string(LayerKind k) {
  return k == LayerKind::convolutional ? "conv" : "fc";
}

Dtype dtype_from_string(const std::string& s) {
  if (s == "float32") return Dtype::f32;
  if (s == "q16") return Dtype::q16;
  throw ParseError("unknown dtype '" + s + "'");
}

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "conv") return LayerKind::convolutional;
  if (s == "fc") return LayerKind::fully_connected;
  throw ParseError("unknown layer kind '" + s + "'");
}

uint64_t DenseTensor::element_count() const {
  uint64_t n = 1;
  for (uint64_t e : shape) n *= e;
  return shape.empty() ? 0 : n;
}

void DenseTensor::validate() const {
  if (name.empty()) throw ArgError("tensor has an empty name");
  if (shape.empty()) throw ArgError("tensor '" + name + "' has an empty shape");
  uint64_t n = 1;
  for (uint64_t e : shape) {
    if (e == 0) throw ArgError("tensor '" + name + "' has a zero extent");
    if (n > std::numeric_limits<uint64_t>::max() / e)
      throw ArgError("tensor '" + name + "' shape overflows");
    n *= e;
  }
  if (dtype == Dtype::f32) {
    if (f32.size() != n || !q16.empty())
      throw ArgError("tensor '" + name + "' float32 storage does not match its shape");
  } else {
    if (q16.size() != n || !f32.empty())
      throw ArgError("tensor '" + name + "' q16 storage does not match its shape");
    if (!(scale > 0.0f))
      throw ArgError("tensor '" + name + "' q16 scale must be positive");
  }
}

std::pair<uint64_t, uint64_t> flatten_dims(const std::vector<uint64_t>& shape) {
  if (shape.size() < 2)
    throw ArgError("cannot flatten a rank-" + std::to_string(shape.size()) +
                   " tensor to a matrix (rank >= 2 required)");
  uint64_t rows = 1;
  for (size_t i = 0; i + 1 < shape.size(); ++i) rows *= shape[i];
  return {rows, shape.back()};
}

namespace {

void check_matrix_extents(const DenseTensor& t, uint64_t rows, uint64_t cols) {
  constexpr uint64_t kMax = std::numeric_limits<uint32_t>::max();
  if (rows > kMax || cols > kMax)
    throw ArgError("tensor '" + t.name + "' flattens beyond 2^32 rows or cols");
}

}  // namespace

QMatrix flatten_to_matrix(const DenseTensor& t) {
  t.validate();
  if (t.dtype != Dtype::q16)
    throw ArgError("tensor '" + t.name + "' is not q16; quantize before building formats");
  auto [rows, cols] = flatten_dims(t.shape);
  check_matrix_extents(t, rows, cols);
  QMatrix m;
  m.rows = static_cast<uint32_t>(rows);
  m.cols = static_cast<uint32_t>(cols);
  m.values = t.q16;
  m.scale = t.scale;
  return m;
}

FMatrix flatten_to_matrix_f32(const DenseTensor& t) {
  t.validate();
  if (t.dtype != Dtype::f32)
    throw ArgError("tensor '" + t.name + "' is not float32");
  auto [rows, cols] = flatten_dims(t.shape);
  check_matrix_extents(t, rows, cols);
  FMatrix m;
  m.rows = static_cast<uint32_t>(rows);
  m.cols = static_cast<uint32_t>(cols);
  m.values = t.f32;
  return m;
}

DenseTensor tensor_from_matrix(const QMatrix& m, const std::string& name,
                               const std::vector<uint64_t>& shape, LayerKind kind) {
  auto [rows, cols] = flatten_dims(shape);
  if (rows != m.rows || cols != m.cols)
    throw ArgError("shape does not flatten to a " + std::to_string(m.rows) + "x" +
                   std::to_string(m.cols) + " matrix for tensor '" + name + "'");
  DenseTensor t;
  t.name = name;
  t.shape = shape;
  t.dtype = Dtype::q16;
  t.kind = kind;
  t.q16 = m.values;
  t.scale = m.scale;
  t.validate();
  return t;
}

}  // namespace wtc
