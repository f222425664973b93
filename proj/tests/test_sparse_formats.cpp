// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>

#include "core/serialize.hpp"
#include "core/sparse.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace wtc;
using namespace wtc::testing;

namespace {

QMatrix matrix_of(uint32_t rows, uint32_t cols, std::vector<int16_t> values,
                  float scale = 1.0f) {
  QMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values = std::move(values);
  m.scale = scale;
  return m;
}

QMatrix planted_matrix(uint64_t rows, uint64_t cols, uint32_t w, uint32_t u,
                       double sparsity, uint64_t seed) {
  DenseTensor t = synth_planted(rows, cols, w, u, sparsity, seed);
  QMatrix m;
  m.rows = uint32_t(rows);
  m.cols = uint32_t(cols);
  m.scale = synth_grid_step();
  m.values.resize(rows * cols);
  for (size_t i = 0; i < t.f32.size(); ++i)
    m.values[i] = int16_t(t.f32[i] / synth_grid_step());
  return m;
}

}  // namespace

TEST_CASE("an all-zero matrix stores no blocks") {
  QMatrix m = matrix_of(4, 4, std::vector<int16_t>(16, 0));
  BsrMatrix b = to_bsr(m, 2, 2);
  CHECK(b.row_ptr == std::vector<uint32_t>{0, 0, 0});
  CHECK(b.col_idx.empty());
  CHECK(b.blocks.empty());

  SbsrMatrix s = to_sbsr(m, 2, 2);
  CHECK(s.row_ptr == std::vector<uint32_t>{0, 0, 0});
  CHECK(s.block_count() == 0);
  CHECK(s.unique_count() == 0);
  CHECK(decode(b).values == m.values);
  CHECK(decode(s).values == m.values);
}

TEST_CASE("a single nonzero claims exactly one block") {
  std::vector<int16_t> v(16, 0);
  v[0] = 7;
  QMatrix m = matrix_of(4, 4, v);
  BsrMatrix b = to_bsr(m, 2, 2);
  CHECK(b.row_ptr == std::vector<uint32_t>{0, 1, 1});
  CHECK(b.col_idx == std::vector<uint32_t>{0});
  CHECK(b.blocks == std::vector<int16_t>{7, 0, 0, 0});
  CHECK(decode(b).values == m.values);
}

TEST_CASE("edge blocks are zero-padded and stripped on decode") {
  // 3x5 with 1x2 blocks: the last block column covers only one real column.
  QMatrix m = matrix_of(3, 5, {1, 2, 0, 0, 5,
                               0, 0, 0, 0, 0,
                               0, 3, 4, 0, 9});
  for (auto [bh, bw] : std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {2, 2}, {3, 4}}) {
    BsrMatrix b = to_bsr(m, bh, bw);
    SbsrMatrix s = to_sbsr(m, bh, bw);
    CHECK(decode(b).values == m.values);
    CHECK(decode(s).values == m.values);
    CHECK(decode(b).rows == 3);
    CHECK(decode(b).cols == 5);
  }
  // Width 2 tiling: row 0 stores (1,2) and (5,pad); row 2 stores (0,3),
  // (4,0), and (9,pad).
  BsrMatrix b = to_bsr(m, 1, 2);
  CHECK(b.row_ptr == std::vector<uint32_t>{0, 2, 2, 5});
  CHECK(b.col_idx == std::vector<uint32_t>{0, 2, 0, 1, 2});
  CHECK(b.blocks == std::vector<int16_t>{1, 2, 5, 0, 0, 3, 4, 0, 9, 0});
}

TEST_CASE("identical blocks share one payload") {
  // Eight copies of the same 1x2 block.
  QMatrix m = matrix_of(4, 4, {3, -1, 3, -1,
                               3, -1, 3, -1,
                               3, -1, 3, -1,
                               3, -1, 3, -1});
  SbsrMatrix s = to_sbsr(m, 1, 2);
  CHECK(s.block_count() == 8);
  CHECK(s.unique_count() == 1);
  CHECK(s.repeat_count() == 7);

  auto canon = s.canonical();
  CHECK(canon.unique_blocks == std::vector<int16_t>{3, -1});
  REQUIRE(canon.refs.size() == 7);
  for (uint32_t ref : canon.refs) CHECK(ref == 0);
  CHECK_FALSE(canon.is_repeat(0));  // first appearance
  for (uint64_t k = 1; k < 8; ++k) CHECK(canon.is_repeat(k));
  // Packed MSB-first: bits 1..7 set in the first byte.
  REQUIRE(canon.flags.size() == 1);
  CHECK(canon.flags[0] == 0x7f);
  CHECK(decode(s).values == m.values);
}

TEST_CASE("all-distinct blocks store every payload") {
  QMatrix m = matrix_of(2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  SbsrMatrix s = to_sbsr(m, 1, 2);
  CHECK(s.block_count() == 4);
  CHECK(s.unique_count() == 4);
  auto canon = s.canonical();
  CHECK(canon.refs.empty());
  for (uint64_t k = 0; k < 4; ++k) CHECK_FALSE(canon.is_repeat(k));
  // First-appearance order is the storage order.
  CHECK(canon.unique_blocks == std::vector<int16_t>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("canonical refs always point strictly backward") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    QMatrix m = random_qmatrix(rng, uint32_t(2 + draw(rng, 40)),
                               uint32_t(2 + draw(rng, 40)), 0.6, 3);
    SbsrMatrix s = to_sbsr(m, 1, uint32_t(1 + draw(rng, 4)));
    auto canon = s.canonical();
    uint32_t uniques_seen = 0;
    size_t next_ref = 0;
    for (uint64_t k = 0; k < s.block_count(); ++k) {
      if (canon.is_repeat(k)) {
        REQUIRE(next_ref < canon.refs.size());
        CHECK(canon.refs[next_ref] < uniques_seen);
        ++next_ref;
      } else {
        ++uniques_seen;
      }
    }
    CHECK(uniques_seen == s.unique_count());
    CHECK(next_ref == canon.refs.size());
  }
}

TEST_CASE("planted redundancy bounds the unique count") {
  for (uint64_t seed : {10, 11, 12}) {
    QMatrix m = planted_matrix(24, 24, 4, 3, 0.5, seed);
    SbsrMatrix s = to_sbsr(m, 1, 4);
    CHECK(s.unique_count() <= 3);
    CHECK(decode(s).values == m.values);
  }
}

TEST_CASE("BSR and SBSR agree on the index structure") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 25; ++i) {
    QMatrix m = random_qmatrix(rng, uint32_t(1 + draw(rng, 50)),
                               uint32_t(1 + draw(rng, 50)), 0.7);
    uint32_t bh = uint32_t(1 + draw(rng, 3));
    uint32_t bw = uint32_t(1 + draw(rng, 5));
    BsrMatrix b = to_bsr(m, bh, bw);
    SbsrMatrix s = to_sbsr(m, bh, bw);
    CHECK(b.row_ptr == s.row_ptr);
    CHECK(b.col_idx == s.col_idx);
    CHECK(decode(b).values == decode(s).values);
    CHECK(s.build_touches == s.block_count());
    validate_structure(b);
    validate_structure(s);
  }
}

TEST_CASE("conversion rejects degenerate inputs") {
  QMatrix m = matrix_of(2, 2, {1, 0, 0, 1});
  CHECK_THROWS_AS(to_bsr(m, 0, 1), ArgError);
  CHECK_THROWS_AS(to_sbsr(m, 1, 0), ArgError);
  QMatrix bad = matrix_of(2, 2, {1, 0, 0});  // short storage
  CHECK_THROWS_AS(to_bsr(bad, 1, 1), ArgError);
}

TEST_CASE("structural validation catches corruption") {
  QMatrix m = matrix_of(4, 4, {1, 1, 0, 0,
                               0, 0, 2, 2,
                               3, 3, 0, 0,
                               0, 0, 1, 1});
  SUBCASE("column index out of range") {
    BsrMatrix b = to_bsr(m, 2, 2);
    b.col_idx[0] = 9;
    CHECK_THROWS_AS(validate_structure(b), ParseError);
  }
  SUBCASE("row pointers not monotone") {
    BsrMatrix b = to_bsr(m, 2, 2);
    b.row_ptr[1] = 5;
    CHECK_THROWS_AS(validate_structure(b), ParseError);
  }
  SUBCASE("duplicate column within a block row") {
    // Width-1 blocks put two entries in row 0 (columns 0 and 1).
    BsrMatrix b = to_bsr(m, 1, 1);
    b.col_idx[1] = b.col_idx[0];
    CHECK_THROWS_AS(validate_structure(b), ParseError);
  }
  SUBCASE("reference to a dead slot") {
    SbsrMatrix s = to_sbsr(m, 2, 2);
    s.entry_slot[0] = 99;
    CHECK_THROWS_AS(validate_structure(s), ParseError);
  }
  SUBCASE("refcount drift") {
    SbsrMatrix s = to_sbsr(m, 1, 2);
    REQUIRE(s.slot_refs.size() >= 1);
    s.slot_refs[0] += 1;
    CHECK_THROWS_AS(validate_structure(s), ParseError);
  }
}

TEST_CASE("get_block returns stored, zero, or raises") {
  QMatrix m = matrix_of(4, 4, {1, 2, 0, 0,
                               0, 0, 0, 0,
                               0, 0, 3, 4,
                               0, 0, 0, 0});
  SbsrMatrix s = to_sbsr(m, 2, 2);
  CHECK(get_block(s, 0, 0) == std::vector<int16_t>{1, 2, 0, 0});
  CHECK(get_block(s, 1, 1) == std::vector<int16_t>{3, 4, 0, 0});
  CHECK(get_block(s, 0, 1) == std::vector<int16_t>{0, 0, 0, 0});  // unstored
  CHECK_THROWS_AS(get_block(s, 2, 0), ArgError);
  CHECK_THROWS_AS(get_block(s, 0, 2), ArgError);
}

TEST_CASE("update_block rewrites payloads while preserving sharing") {
  QMatrix m = matrix_of(4, 4, {5, 5, 5, 5,
                               0, 0, 0, 0,
                               5, 5, 5, 5,
                               0, 0, 0, 0});
  SbsrMatrix s = to_sbsr(m, 1, 2);  // four copies of {5,5}
  REQUIRE(s.block_count() == 4);
  REQUIRE(s.unique_count() == 1);

  SUBCASE("repeat diverges into a fresh slot") {
    update_block(s, 0, 1, std::vector<int16_t>{9, 9});
    CHECK(s.unique_count() == 2);
    CHECK(get_block(s, 0, 1) == std::vector<int16_t>{9, 9});
    CHECK(get_block(s, 0, 0) == std::vector<int16_t>{5, 5});
    validate_structure(s);
  }
  SUBCASE("rewriting to an existing payload re-shares it") {
    update_block(s, 0, 1, std::vector<int16_t>{9, 9});
    update_block(s, 0, 1, std::vector<int16_t>{5, 5});
    CHECK(s.unique_count() == 1);  // the {9,9} slot was freed
    CHECK(s.free_slots.size() == 1);
    validate_structure(s);
  }
  SUBCASE("last user departing frees the slot") {
    for (auto [br, bc] : std::vector<std::pair<uint64_t, uint64_t>>{
             {0, 0}, {0, 1}, {2, 0}, {2, 1}}) {
      update_block(s, br, bc, std::vector<int16_t>{int16_t(br + 10), int16_t(bc + 20)});
    }
    // The final rewrite found {5,5} down to one user and reused its slot in
    // place, so nothing is free yet.
    CHECK(s.unique_count() == 4);
    CHECK(s.free_slots.empty());
    // (0,0) is the sole user of {10,20}; moving it onto an existing payload
    // releases that slot.
    update_block(s, 0, 0, std::vector<int16_t>{12, 21});
    CHECK(s.unique_count() == 3);
    CHECK(s.free_slots.size() == 1);
    // A fresh payload for a now-shared entry drains the free list before
    // growing the store.
    update_block(s, 0, 0, std::vector<int16_t>{1, 2});
    CHECK(s.unique_count() == 4);
    CHECK(s.free_slots.empty());
    validate_structure(s);
  }
  SUBCASE("decode reflects updates") {
    update_block(s, 2, 1, std::vector<int16_t>{7, -7});
    QMatrix d = decode(s);
    CHECK(d.at(2, 2) == 7);
    CHECK(d.at(2, 3) == -7);
    CHECK(d.at(0, 0) == 5);
  }
  SUBCASE("the sparsity pattern is immutable") {
    CHECK_THROWS_AS(update_block(s, 1, 0, std::vector<int16_t>{1, 1}), ArgError);
    CHECK_THROWS_AS(update_block(s, 0, 0, std::vector<int16_t>{0, 0}), ArgError);
    CHECK_THROWS_AS(update_block(s, 0, 0, std::vector<int16_t>{1}), ArgError);
    CHECK_THROWS_AS(update_block(s, 7, 0, std::vector<int16_t>{1, 1}), ArgError);
  }
  SUBCASE("no-op update changes nothing") {
    update_block(s, 0, 0, std::vector<int16_t>{5, 5});
    CHECK(s.unique_count() == 1);
    CHECK(s.free_slots.empty());
  }
}

TEST_CASE("random update sequences keep the structure valid") {
  std::mt19937_64 rng(41);
  QMatrix m = random_qmatrix(rng, 20, 24, 0.5, 4);
  SbsrMatrix s = to_sbsr(m, 1, 4);
  QMatrix mirror = decode(s);

  // Collect the stored block coordinates once.
  std::vector<std::pair<uint64_t, uint64_t>> stored;
  for (uint32_t br = 0; br + 1 < s.row_ptr.size(); ++br)
    for (uint32_t k = s.row_ptr[br]; k < s.row_ptr[br + 1]; ++k)
      stored.emplace_back(br, s.col_idx[k]);
  REQUIRE_FALSE(stored.empty());

  for (int step = 0; step < 200; ++step) {
    auto [br, bc] = stored[draw(rng, stored.size())];
    std::vector<int16_t> payload(4);
    // Small palette so re-sharing happens often; never all-zero.
    payload[draw(rng, 4)] = int16_t(1 + draw(rng, 3));
    update_block(s, br, bc, payload);
    for (uint32_t j = 0; j < 4; ++j) {
      uint64_t c = bc * 4 + j;
      if (c < mirror.cols) mirror.at(uint32_t(br), uint32_t(c)) = payload[j];
    }
    if (step % 20 == 0) validate_structure(s);
  }
  validate_structure(s);
  CHECK(decode(s).values == mirror.values);
  // Sharing stays content-addressed: unique == live payload count.
  auto hist = brute_histogram(decode(s), 1, 4);
  CHECK(s.unique_count() == hist.size());
}

TEST_CASE("spmv matches the dense oracle bit for bit") {
  std::mt19937_64 rng(43);
  SUBCASE("identity-ish fixed case") {
    QMatrix m = matrix_of(2, 3, {1, 0, -2, 0, 4, 0}, 0.5f);
    std::vector<double> x = {1.0, 2.0, 3.0};
    auto yb = spmv(to_bsr(m, 1, 2), x);
    auto ys = spmv(to_sbsr(m, 1, 2), x);
    auto yd = dense_spmv(m, x);
    CHECK(yb == yd);
    CHECK(ys == yd);
    CHECK(yd == std::vector<double>{1 * 0.5 - 2 * 0.5 * 3, 4 * 0.5 * 2});
  }
  SUBCASE("zero matrix yields exact zeros") {
    QMatrix m = matrix_of(3, 3, std::vector<int16_t>(9, 0));
    std::vector<double> x = {1.5, -2.5, 3.5};
    auto y = spmv(to_sbsr(m, 2, 2), x);
    CHECK(y == std::vector<double>{0.0, 0.0, 0.0});
  }
  SUBCASE("randomized agreement") {
    for (int i = 0; i < 40; ++i) {
      uint32_t rows = uint32_t(1 + draw(rng, 40));
      uint32_t cols = uint32_t(1 + draw(rng, 40));
      QMatrix m = random_qmatrix(rng, rows, cols, 0.6);
      std::vector<double> x(cols);
      for (double& v : x) v = (double(rng()) / double(UINT64_MAX)) * 4.0 - 2.0;
      uint32_t bh = uint32_t(1 + draw(rng, 3));
      uint32_t bw = uint32_t(1 + draw(rng, 5));
      auto yd = dense_spmv(m, x);
      auto yb = spmv(to_bsr(m, bh, bw), x);
      auto ys = spmv(to_sbsr(m, bh, bw), x);
      REQUIRE(yb.size() == yd.size());
      for (size_t r = 0; r < yd.size(); ++r) {
        CHECK(std::bit_cast<uint64_t>(yb[r]) == std::bit_cast<uint64_t>(yd[r]));
        CHECK(std::bit_cast<uint64_t>(ys[r]) == std::bit_cast<uint64_t>(yd[r]));
      }
    }
  }
  SUBCASE("dimension mismatch raises") {
    QMatrix m = matrix_of(2, 3, {1, 0, 0, 0, 1, 0});
    std::vector<double> x = {1.0, 2.0};
    CHECK_THROWS_AS(spmv(to_bsr(m, 1, 1), x), ArgError);
  }
}

TEST_CASE("serialized sparse sections round-trip exactly") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    QMatrix m = random_qmatrix(rng, uint32_t(1 + draw(rng, 30)),
                               uint32_t(1 + draw(rng, 30)), 0.55);
    uint32_t bw = uint32_t(1 + draw(rng, 4));
    BsrMatrix b = to_bsr(m, 1, bw);
    SbsrMatrix s = to_sbsr(m, 1, bw);

    BsrMatrix b2 = deserialize_bsr(serialize(b).bytes);
    CHECK(b2.row_ptr == b.row_ptr);
    CHECK(b2.col_idx == b.col_idx);
    CHECK(b2.blocks == b.blocks);
    CHECK(decode(b2).values == m.values);

    SbsrMatrix s2 = deserialize_sbsr(serialize(s).bytes);
    CHECK(s2.unique_count() == s.unique_count());
    CHECK(decode(s2).values == m.values);
  }
}

TEST_CASE("corrupt sparse sections are rejected") {
  QMatrix m = matrix_of(4, 4, {1, 1, 2, 2,
                               1, 1, 2, 2,
                               0, 0, 3, 3,
                               0, 0, 3, 3});
  SbsrMatrix s = to_sbsr(m, 2, 2);
  auto section = serialize(s);

  SUBCASE("truncated") {
    auto bytes = section.bytes;
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(deserialize_sbsr(bytes), ParseError);
  }
  SUBCASE("trailing garbage") {
    auto bytes = section.bytes;
    bytes.push_back(0);
    CHECK_THROWS_AS(deserialize_sbsr(bytes), ParseError);
  }
  SUBCASE("repeat flag without a matching ref") {
    // Flip the first flag bit to "repeat": block 0 would need a ref, but
    // none were serialized.
    auto bytes = section.bytes;
    REQUIRE(s.block_count() == 3);
    // Header is 7 u32 fields; flags sit after row_ptr (3) and col_idx (3).
    size_t flags_at = 4 * (7 + 3 + 3);
    bytes[flags_at] |= 0x80;
    CHECK_THROWS_AS(deserialize_sbsr(bytes), ParseError);
  }
  SUBCASE("ref pointing past the uniques seen so far") {
    // Pattern A B A: one repeat referencing unique 0. Corrupt the ref to 5.
    QMatrix seq = matrix_of(1, 6, {1, 1, 2, 2, 1, 1});
    auto sec = serialize(to_sbsr(seq, 1, 2));
    // Header (7 u32) + row_ptr (2 u32) + col_idx (3 u32) + flags (1 byte).
    size_t ref_at = 4 * (7 + 2 + 3) + 1;
    REQUIRE(sec.bytes.size() >= ref_at + 4);
    sec.bytes[ref_at] = 5;
    CHECK_THROWS_WITH_AS(deserialize_sbsr(sec.bytes),
                         doctest::Contains("before it is defined"), ParseError);
  }
}
