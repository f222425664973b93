// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wtc {

// Base error for everything this library can reject. Subclasses exist so the
// C API can map failures onto distinct status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller handed us something malformed (bad argument, bad coordinates, ...).
class ArgError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (missing path, short read, write failure).
class IoError : public Error {
 public:
  using Error::Error;
};

// Input bytes or structures failed validation while being decoded.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Values fall outside a representable range (quantization overflow).
class RangeError : public Error {
 public:
  using Error::Error;
};

enum class Dtype : uint8_t { f32, q16 };

enum class LayerKind : uint8_t { convolutional, fully_connected };

const char* to_string(Dtype d);
const char* to_string(LayerKind k);
Dtype dtype_from_string(const std::string& s);
LayerKind layer_kind_from_string(const std::string& s);

// Dense 2D views used by the sparse and entropy coders. Row-major storage.
struct QMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<int16_t> values;  // rows * cols entries
  float scale = 1.0f;           // grid step shared by every element

  int16_t at(uint32_t r, uint32_t c) const { return values[size_t(r) * cols + c]; }
  int16_t& at(uint32_t r, uint32_t c) { return values[size_t(r) * cols + c]; }
};

struct FMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<float> values;

  float at(uint32_t r, uint32_t c) const { return values[size_t(r) * cols + c]; }
};

// The one dequantization rule used everywhere (spmv, reports, oracles must
// agree bit-for-bit, so there is exactly one definition).
inline float dequant(int16_t q, float scale) { return static_cast<float>(q) * scale; }

}  // namespace wtc
