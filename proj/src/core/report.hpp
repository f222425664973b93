// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/sweep.hpp"

namespace wtc {

// One typed table cell. Formatting is centralized here so every consumer of
// a report (library caller, CLI, tests) emits identical bytes.
struct Cell {
  enum class Kind : uint8_t { blank, text, integer, number };
  Kind kind = Kind::blank;
  std::string text;
  uint64_t i = 0;
  double f = 0.0;
  int precision = 4;

  static Cell blank();
  static Cell str(std::string s);
  static Cell integer(uint64_t v);
  static Cell number(double v, int precision);
  static Cell number(std::optional<double> v, int precision);  // blank if absent

  std::string to_string() const;  // CSV text, unescaped
};

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Stable header row, minimal quoting, '\n' line ends, trailing newline.
  std::string to_csv() const;
  // Array of one column->value object per row; blank cells become null.
  std::string to_json() const;
};

enum class ReportFormat : uint8_t { csv, json };

ReportFormat report_format_from_string(const std::string& s);
std::string render(const Report& r, ReportFormat f);

// Shared knob set for the container-level drivers. `widths` feeds the sweep;
// analyze and the comparisons use one width per layer: the kernel width for
// convolutional tensors and fc_width for fully-connected ones.
struct AnalyzeOptions {
  std::optional<PruneSpec> prune;
  QuantOpts quant;
  uint32_t fc_width = 4;
  WidthPolicy policy = WidthPolicy::fixed32;
  bool fc_only = false;
  std::vector<uint32_t> widths = {1, 2, 4, 8, 16};
};

uint32_t effective_width(const DenseTensor& t, uint32_t fc_width);

// Per-tensor drivers, parallel across layers, results in input order.
std::vector<LayerReport> analyze_container(const std::vector<DenseTensor>& tensors,
                                           const AnalyzeOptions& opts);
std::vector<SweepResult> sweep_container(const std::vector<DenseTensor>& tensors,
                                         const AnalyzeOptions& opts);
std::vector<RoundingComparison> rounding_container(const std::vector<DenseTensor>& tensors,
                                                   const AnalyzeOptions& opts);

// Table builders. analyze_report emits, per layer, a dense row, per-component
// rows for each format, and per-format total rows carrying the size ratios.
Report analyze_report(const std::vector<LayerReport>& layers);
Report sweep_report(const std::vector<SweepResult>& sweeps);
Report rounding_report(const std::vector<RoundingComparison>& comparisons);
Report huffman_report(const std::vector<LayerReport>& layers);

}  // namespace wtc
