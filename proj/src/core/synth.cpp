// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/synth.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "core/util.hpp"

namespace wtc {
namespace {

constexpr float kGridStep = 1.0f / 256.0f;  // exactly representable
constexpr int kMaxMagnitude = 4095;         // pattern values in [-4095, 4095] \ {0}

// Bounded draw from the raw engine stream. The slight modulo bias is
// irrelevant for synthesis and keeps output identical on every platform,
// unlike std::uniform_int_distribution.
uint64_t draw(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

int16_t draw_nonzero_value(std::mt19937_64& rng) {
  int16_t mag = static_cast<int16_t>(1 + draw(rng, kMaxMagnitude));
  return (rng() & 1) ? mag : static_cast<int16_t>(-mag);
}

}  // namespace

float synth_grid_step() { return kGridStep; }

DenseTensor synth_planted(uint64_t rows, uint64_t cols, uint32_t block_w,
                          uint32_t n_unique, double sparsity, uint64_t seed,
                          const std::string& name) {
  if (rows == 0 || cols == 0) throw ArgError("synth: extents must be positive");
  if (block_w == 0 || cols % block_w != 0)
    throw ArgError("synth: block width must divide the column count");
  if (!(sparsity >= 0.0 && sparsity <= 1.0))
    throw ArgError("synth: sparsity must lie in [0, 1]");
  const uint64_t slots = rows * (cols / block_w);
  if (n_unique == 0 || n_unique > slots)
    throw ArgError("synth: need 1 <= n_unique <= " + std::to_string(slots) +
                   " block slots");

  std::mt19937_64 rng(seed);

  // Distinct nonzero patterns; collisions are vanishingly rare but retried.
  std::set<std::vector<int16_t>> seen;
  std::vector<std::vector<int16_t>> patterns;
  patterns.reserve(n_unique);
  while (patterns.size() < n_unique) {
    std::vector<int16_t> p(block_w);
    for (auto& v : p) v = draw_nonzero_value(rng);
    if (seen.insert(p).second) patterns.push_back(std::move(p));
  }

  // Exact zero-slot count, placed by a Fisher-Yates shuffle of slot ids.
  const uint64_t zero_slots = static_cast<uint64_t>(sparsity * double(slots) + 0.5);
  std::vector<uint64_t> order(slots);
  for (uint64_t i = 0; i < slots; ++i) order[i] = i;
  for (uint64_t i = slots; i > 1; --i) std::swap(order[i - 1], order[draw(rng, i)]);
  std::vector<uint8_t> is_zero(slots, 0);
  for (uint64_t i = 0; i < zero_slots; ++i) is_zero[order[i]] = 1;

  // First n_unique surviving slots cycle through the pool so every pattern
  // appears; the rest draw uniformly (skewed counts, like real layers).
  std::vector<float> values(rows * cols, 0.0f);
  uint64_t survivor = 0;
  const uint64_t blocks_per_row = cols / block_w;
  for (uint64_t s = 0; s < slots; ++s) {
    if (is_zero[s]) continue;
    uint64_t pick = survivor < n_unique ? survivor : draw(rng, n_unique);
    ++survivor;
    const std::vector<int16_t>& p = patterns[pick];
    uint64_t base = (s / blocks_per_row) * cols + (s % blocks_per_row) * block_w;
    for (uint32_t j = 0; j < block_w; ++j) values[base + j] = float(p[j]) * kGridStep;
  }

  DenseTensor t;
  t.name = name;
  t.shape = {rows, cols};
  t.dtype = Dtype::f32;
  t.kind = LayerKind::fully_connected;
  t.f32 = std::move(values);
  t.validate();
  return t;
}

std::vector<DenseTensor> synth_lenet(uint32_t n_unique, double sparsity, uint64_t seed) {
  struct Spec {
    const char* name;
    std::vector<uint64_t> shape;
    LayerKind kind;
    uint32_t width;
  };
  const Spec specs[] = {
      {"conv1", {20, 1, 5, 5}, LayerKind::convolutional, 5},
      {"conv2", {50, 20, 5, 5}, LayerKind::convolutional, 5},
      {"fc3", {500, 800}, LayerKind::fully_connected, 8},
      {"fc4", {10, 500}, LayerKind::fully_connected, 4},
  };
  std::vector<DenseTensor> out;
  out.reserve(4);
  uint64_t layer_seed = seed;
  for (const Spec& s : specs) {
    auto [rows, cols] = flatten_dims(s.shape);
    uint64_t slots = rows * (cols / s.width);
    uint32_t u = n_unique == 0 ? 1 : n_unique;
    if (u > slots) u = static_cast<uint32_t>(slots);
    DenseTensor t =
        synth_planted(rows, cols, s.width, u, sparsity, layer_seed++, s.name);
    t.shape = s.shape;  // same element count, conv layers regain their 4-d shape
    t.kind = s.kind;
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace wtc
