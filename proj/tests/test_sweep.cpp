// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/report.hpp"
#include "core/sparse.hpp"
#include "core/sweep.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace wtc;
using namespace wtc::testing;

namespace {

QMatrix matrix_of(uint32_t rows, uint32_t cols, std::vector<int16_t> values) {
  QMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values = std::move(values);
  return m;
}

DenseTensor f32_tensor(const std::string& name, uint64_t rows, uint64_t cols,
                       std::vector<float> values) {
  DenseTensor t;
  t.name = name;
  t.shape = {rows, cols};
  t.dtype = Dtype::f32;
  t.f32 = std::move(values);
  return t;
}

}  // namespace

TEST_CASE("block histogram counts stored blocks by payload") {
  SUBCASE("eight identical rows collapse to one entry") {
    std::vector<int16_t> v;
    for (int r = 0; r < 8; ++r) v.insert(v.end(), {4, -4});
    FreqMap h = block_histogram(matrix_of(8, 2, v), 2);
    REQUIRE(h.size() == 1);
    CHECK(h.at({4, -4}) == 8);
  }
  SUBCASE("an all-zero matrix has an empty histogram") {
    CHECK(block_histogram(matrix_of(4, 4, std::vector<int16_t>(16, 0)), 2).empty());
  }
  SUBCASE("matches the brute-force computation on random input") {
    std::mt19937_64 rng(89);
    for (int i = 0; i < 30; ++i) {
      QMatrix m = random_qmatrix(rng, uint32_t(1 + draw(rng, 40)),
                                 uint32_t(1 + draw(rng, 40)), 0.6, 4);
      uint32_t w = uint32_t(1 + draw(rng, 5));
      auto got = block_histogram(m, w);
      auto want = brute_histogram(m, 1, w);
      CHECK(got == want);

      // Histogram counts and the shared-block structure must agree.
      SbsrMatrix s = to_sbsr(m, 1, w);
      uint64_t total = 0;
      for (const auto& [payload, count] : got) total += count;
      CHECK(total == s.block_count());
      CHECK(got.size() == s.unique_count());
    }
  }
  SUBCASE("width must be positive") {
    CHECK_THROWS_AS(block_histogram(matrix_of(1, 1, {1}), 0), ArgError);
  }
}

TEST_CASE("width sweep finds the cheapest tiling") {
  SUBCASE("a diagonal favors narrow blocks") {
    std::vector<int16_t> v(64, 0);
    for (int i = 0; i < 8; ++i) v[i * 8 + i] = 3;
    SweepResult r = sweep_block_width(matrix_of(8, 8, v), {1, 2, 4},
                                      WidthPolicy::theoretical, "diag");
    CHECK(r.best_width == 1);
    CHECK(r.layer == "diag");
    REQUIRE(r.candidates.size() == 3);
    CHECK(r.candidates[0].stored_blocks == 8);
    CHECK(r.candidates[0].unique_blocks == 1);
  }
  SUBCASE("a dense distinct matrix favors wide blocks") {
    std::vector<int16_t> v(32);
    for (int i = 0; i < 32; ++i) v[i] = int16_t(i + 1);
    SweepResult r = sweep_block_width(matrix_of(4, 8, v), {1, 2, 4},
                                      WidthPolicy::fixed32);
    CHECK(r.best_width == 4);
  }
  SUBCASE("ties resolve toward the smaller width") {
    // All-zero matrix: every width stores nothing, totals are equal.
    SweepResult r = sweep_block_width(matrix_of(4, 8, std::vector<int16_t>(32, 0)),
                                      {8, 4, 2}, WidthPolicy::theoretical);
    CHECK(r.best_width == 2);
    CHECK(r.candidates[0].size.total_bits == r.candidates[2].size.total_bits);
  }
  SUBCASE("candidates carry the exact per-width sizes") {
    std::mt19937_64 rng(97);
    QMatrix m = random_qmatrix(rng, 24, 24, 0.5, 5);
    SweepResult r = sweep_block_width(m, {1, 2, 3, 4, 6}, WidthPolicy::theoretical);
    for (const WidthCandidate& c : r.candidates) {
      SbsrMatrix s = to_sbsr(m, 1, c.width);
      CHECK(c.stored_blocks == s.block_count());
      CHECK(c.unique_blocks == s.unique_count());
      CHECK(c.size.total_bits == size_sbsr(s, WidthPolicy::theoretical).total_bits);
    }
    uint64_t best = UINT64_MAX;
    for (const WidthCandidate& c : r.candidates)
      best = std::min(best, c.size.total_bits);
    for (const WidthCandidate& c : r.candidates)
      if (c.width == r.best_width) CHECK(c.size.total_bits == best);
  }
  SUBCASE("an empty width list is rejected") {
    CHECK_THROWS_AS(sweep_block_width(matrix_of(1, 1, {1}), {}, WidthPolicy::fixed32),
                    ArgError);
  }
}

TEST_CASE("rounding comparison quantizes under both modes") {
  QuantGrid grid;
  grid.scale = 1.0f;

  SUBCASE("on-grid values make the modes identical") {
    DenseTensor t = f32_tensor("grid", 2, 2, {1.0f, -2.0f, 0.0f, 3.0f});
    RoundingComparison c = compare_rounding(t, grid, 1, WidthPolicy::fixed32);
    CHECK(c.unique_truncate == c.unique_nearest);
    CHECK(c.total_bits_truncate == c.total_bits_nearest);
  }
  SUBCASE("off-grid values can diverge") {
    // 0.6 truncates to zero but rounds to one; 1.6 lands on 1 vs 2.
    DenseTensor t = f32_tensor("off", 1, 2, {0.6f, 1.6f});
    RoundingComparison c = compare_rounding(t, grid, 1, WidthPolicy::theoretical);
    CHECK(c.unique_truncate == 1);
    CHECK(c.unique_nearest == 2);
    CHECK(c.total_bits_truncate != c.total_bits_nearest);
    CHECK(c.layer == "off");
    CHECK(c.width == 1);
  }
  SUBCASE("q16 input is rejected") {
    DenseTensor q;
    q.name = "q";
    q.shape = {1, 1};
    q.dtype = Dtype::q16;
    q.q16 = {1};
    q.scale = 1.0f;
    CHECK_THROWS_AS(compare_rounding(q, grid, 1, WidthPolicy::fixed32), ArgError);
  }
}

TEST_CASE("grid resolution follows the scale mode") {
  DenseTensor t = f32_tensor("t", 1, 3, {1.0f, -4.0f, 2.0f});
  QuantOpts opts;

  SUBCASE("automatic uses the value range") {
    QuantGrid g = resolve_grid(t, opts, std::nullopt);
    CHECK(g.scale == default_scale(t, 16));
  }
  SUBCASE("threshold borrows the pruning cutoff") {
    opts.scale_mode = ScaleMode::threshold;
    QuantGrid g = resolve_grid(t, opts, PruneSpec::by_threshold(0.25f));
    CHECK(g.scale == 0.25f);
    CHECK_THROWS_AS(resolve_grid(t, opts, std::nullopt), ArgError);
    CHECK_THROWS_AS(resolve_grid(t, opts, PruneSpec::by_target(0.5)), ArgError);
  }
  SUBCASE("explicit value passes through") {
    opts.scale_mode = ScaleMode::explicit_value;
    opts.scale = 0.125f;
    CHECK(resolve_grid(t, opts, std::nullopt).scale == 0.125f);
    opts.scale = 0.0f;
    CHECK_THROWS_AS(resolve_grid(t, opts, std::nullopt), ArgError);
  }
}

TEST_CASE("layer analysis runs the full pipeline") {
  SUBCASE("planted sharing shows up in the ratio") {
    DenseTensor t = synth_planted(32, 32, 4, 2, 0.5, 7, "planted");
    LayerReport r = analyze_layer(t, std::nullopt, QuantOpts{}, 4, WidthPolicy::fixed32);
    CHECK(r.name == "planted");
    CHECK(r.elements == 1024);
    CHECK(r.rows == 32);
    CHECK(r.cols == 32);
    CHECK(r.dense_total_bits == 1024 * 32);

    // Quantization is injective on the planted patterns, so at most two
    // unique blocks survive and sharing must beat plain BSR.
    REQUIRE(r.cr_over_bsr.has_value());
    CHECK(*r.cr_over_bsr > 1.0);
    CHECK(r.sbsr.total_bits < r.bsr.total_bits);
    CHECK(r.sparsity == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("an all-zero layer reports empty encodings") {
    DenseTensor t = f32_tensor("zero", 4, 4, std::vector<float>(16, 0.0f));
    LayerReport r = analyze_layer(t, std::nullopt, QuantOpts{}, 2, WidthPolicy::fixed32);
    CHECK(r.nonzeros == 0);
    CHECK(r.sparsity == 1.0);
    CHECK(r.ehuff.total_bits == 0);
    CHECK(r.vhuff.total_bits == 0);
    CHECK(r.bsr.total_bits > 0);  // row pointers never disappear
    CHECK(r.cr_over_bsr.has_value());
    CHECK_FALSE(r.cr_elem_over_vec.has_value());
    CHECK_FALSE(r.cr_elem_over_sbsr.has_value());
  }
  SUBCASE("pruning feeds quantization") {
    DenseTensor t = f32_tensor("p", 1, 4, {0.1f, 0.9f, -0.2f, -1.0f});
    QuantOpts q;
    q.scale_mode = ScaleMode::explicit_value;
    q.scale = 0.5f;
    LayerReport r = analyze_layer(t, PruneSpec::by_threshold(0.5f), q, 1,
                                  WidthPolicy::fixed32);
    // 0.1 and -0.2 pruned; 0.9 -> 2, -1.0 -> -2 on the half grid.
    CHECK(r.nonzeros == 2);
    CHECK(r.zeroed_by_quant == 0);
  }
  SUBCASE("quantization landing on zero is tallied") {
    DenseTensor t = f32_tensor("z", 1, 4, {0.2f, 0.9f, -0.2f, -1.0f});
    QuantOpts q;
    q.scale_mode = ScaleMode::explicit_value;
    q.scale = 0.5f;
    q.rounding = Rounding::truncate;
    LayerReport r = analyze_layer(t, std::nullopt, q, 1, WidthPolicy::fixed32);
    // 0.2 and -0.2 truncate to zero without having been pruned.
    CHECK(r.zeroed_by_quant == 2);
    CHECK(r.nonzeros == 2);
  }
  SUBCASE("pruning a q16 tensor is rejected") {
    DenseTensor q;
    q.name = "q";
    q.shape = {1, 2};
    q.dtype = Dtype::q16;
    q.q16 = {1, 2};
    q.scale = 1.0f;
    CHECK_THROWS_AS(
        analyze_layer(q, PruneSpec::by_threshold(0.1f), QuantOpts{}, 1, WidthPolicy::fixed32),
        ArgError);
    CHECK_NOTHROW(analyze_layer(q, std::nullopt, QuantOpts{}, 1, WidthPolicy::fixed32));
  }
}

TEST_CASE("container drivers preserve input order and honor fc_only") {
  auto layers = synth_lenet(4, 0.5, 11);
  AnalyzeOptions opts;

  auto reports = analyze_container(layers, opts);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].name == "conv1");
  CHECK(reports[0].width == 5);  // kernel width
  CHECK(reports[2].name == "fc3");
  CHECK(reports[2].width == opts.fc_width);

  opts.fc_only = true;
  auto fc = analyze_container(layers, opts);
  REQUIRE(fc.size() == 2);
  CHECK(fc[0].name == "fc3");
  CHECK(fc[1].name == "fc4");

  // No fully-connected layers at all: empty result, no error.
  std::vector<DenseTensor> convs = {layers[0], layers[1]};
  CHECK(analyze_container(convs, opts).empty());
  CHECK(sweep_container(convs, opts).empty());
  CHECK(rounding_container(convs, opts).empty());
}

TEST_CASE("report cells format deterministically") {
  CHECK(Cell::blank().to_string().empty());
  CHECK(Cell::str("abc").to_string() == "abc");
  CHECK(Cell::integer(42).to_string() == "42");
  CHECK(Cell::number(2.91349, 4).to_string() == "2.9135");
  CHECK(Cell::number(2.0, 2).to_string() == "2.00");
  CHECK(Cell::number(std::optional<double>{}, 4).to_string().empty());

  Report r;
  r.columns = {"name", "value"};
  r.rows.push_back({Cell::str("plain"), Cell::integer(1)});
  r.rows.push_back({Cell::str("with,comma"), Cell::blank()});
  r.rows.push_back({Cell::str("with\"quote"), Cell::number(0.5, 2)});

  SUBCASE("csv quotes only what needs quoting") {
    CHECK(r.to_csv() ==
          "name,value\n"
          "plain,1\n"
          "\"with,comma\",\n"
          "\"with\"\"quote\",0.50\n");
  }
  SUBCASE("json mirrors the csv values with nulls for blanks") {
    std::string j = r.to_json();
    CHECK(j.find("\"name\": \"plain\"") != std::string::npos);
    CHECK(j.find("\"value\": 1") != std::string::npos);
    CHECK(j.find("\"value\": null") != std::string::npos);
    CHECK(j.find("\"value\": 0.5") != std::string::npos);
    CHECK(j.back() == '\n');
  }
  SUBCASE("format names parse") {
    CHECK(report_format_from_string("csv") == ReportFormat::csv);
    CHECK(report_format_from_string("json") == ReportFormat::json);
    CHECK_THROWS_AS(report_format_from_string("xml"), ArgError);
    CHECK(render(r, ReportFormat::csv) == r.to_csv());
    CHECK(render(r, ReportFormat::json) == r.to_json());
  }
}

TEST_CASE("analyze report lays out per-layer format blocks") {
  auto layers = synth_lenet(3, 0.6, 13);
  AnalyzeOptions opts;
  Report rep = analyze_report(analyze_container(layers, opts));
  CHECK(rep.columns == std::vector<std::string>{"layer", "format", "component", "bits",
                                                "bytes", "cr_over_bsr",
                                                "cr_vs_elem_huffman"});
  // Per layer: 1 dense row + (2 + 1) BSR + (4 + 1) SBSR + (3 + 1) + (3 + 1)
  // Huffman rows = 17.
  CHECK(rep.rows.size() == 4 * 17);

  // The SBSR total row carries the ratio; component rows never do.
  bool saw_sbsr_total = false;
  for (const auto& row : rep.rows) {
    REQUIRE(row.size() == rep.columns.size());
    if (row[1].to_string() == "sbsr" && row[2].to_string() == "total") {
      saw_sbsr_total = true;
      CHECK_FALSE(row[5].to_string().empty());
    }
    if (row[2].to_string() != "total") CHECK(row[5].to_string().empty());
  }
  CHECK(saw_sbsr_total);
}

TEST_CASE("sweep report emits one row per layer and width") {
  auto layers = synth_lenet(3, 0.5, 17);
  AnalyzeOptions opts;
  opts.widths = {1, 2, 4};
  Report rep = sweep_report(sweep_container(layers, opts));
  CHECK(rep.columns.front() == "layer");
  CHECK(rep.columns.back() == "best_width");
  CHECK(rep.rows.size() == 4 * 3);

  // best_width is constant within a layer and appears among its widths.
  for (size_t i = 0; i < rep.rows.size(); i += 3) {
    std::string best = rep.rows[i].back().to_string();
    CHECK(rep.rows[i + 1].back().to_string() == best);
    CHECK(rep.rows[i + 2].back().to_string() == best);
  }
}

TEST_CASE("rounding report computes the size ratio") {
  auto layers = synth_lenet(3, 0.5, 19);
  AnalyzeOptions opts;
  Report rep = rounding_report(rounding_container(layers, opts));
  CHECK(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.size() == 7);
    CHECK_FALSE(row.back().to_string().empty());
  }
}

TEST_CASE("huffman report compares the three compressed forms") {
  auto layers = synth_lenet(3, 0.5, 23);
  AnalyzeOptions opts;
  Report rep = huffman_report(analyze_container(layers, opts));
  CHECK(rep.columns == std::vector<std::string>{"layer", "width", "elem_total_bits",
                                                "vector_total_bits", "sbsr_total_bits",
                                                "cr_vector_huffman", "cr_sbsr"});
  CHECK(rep.rows.size() == 4);
}
