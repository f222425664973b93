// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace wtc {

// Deterministic planted-redundancy generator. The rows x cols matrix is tiled
// into 1 x block_w slots; roughly `sparsity` of the slots are zeroed and every
// remaining slot is filled from a pool of exactly n_unique distinct nonzero
// block patterns (all patterns appear when enough slots survive). Values are
// exact multiples of 2^-8, so quantizing with that grid is lossless and the
// planted block structure survives the full prune/quantize pipeline.
//
// Preconditions: block_w divides cols, 1 <= n_unique <= slot count,
// sparsity in [0, 1]. Same seed => identical tensor; distinct seeds diverge.
DenseTensor synth_planted(uint64_t rows, uint64_t cols, uint32_t block_w,
                          uint32_t n_unique, double sparsity, uint64_t seed,
                          const std::string& name = "synth");

// The grid step used by synth_planted values (2^-8).
float synth_grid_step();

// Four planted tensors shaped like the classic LeNet-5 stack: two 5x5 conv
// kernels ([20,1,5,5], [50,20,5,5]) planted at the kernel width and two FC
// layers ([500,800], [10,500]) planted at width 8. n_unique is clamped to
// each layer's slot budget.
std::vector<DenseTensor> synth_lenet(uint32_t n_unique, double sparsity, uint64_t seed);

}  // namespace wtc
