// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/report.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "core/util.hpp"

namespace wtc {
namespace {

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Cell bits_cell(uint64_t bits) { return Cell::integer(bits); }
Cell bytes_cell(uint64_t bits) { return Cell::number(double(bits) / 8.0, 2); }

}  // namespace

Cell Cell::blank() { return Cell{}; }

Cell Cell::str(std::string s) {
  Cell c;
  c.kind = Kind::text;
  c.text = std::move(s);
  return c;
}

Cell Cell::integer(uint64_t v) {
  Cell c;
  c.kind = Kind::integer;
  c.i = v;
  return c;
}

Cell Cell::number(double v, int precision) {
  Cell c;
  c.kind = Kind::number;
  c.f = v;
  c.precision = precision;
  return c;
}

Cell Cell::number(std::optional<double> v, int precision) {
  return v ? number(*v, precision) : blank();
}

std::string Cell::to_string() const {
  switch (kind) {
    case Kind::blank: return "";
    case Kind::text: return text;
    case Kind::integer: return std::to_string(i);
    default: return format_double(f, precision);
  }
}

std::string Report::to_csv() const {
  std::string out;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(columns[c]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_escape(row[c].to_string());
    }
    out += '\n';
  }
  return out;
}

std::string Report::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      switch (cell.kind) {
        case Cell::Kind::blank: obj[columns[c]] = nullptr; break;
        case Cell::Kind::text: obj[columns[c]] = cell.text; break;
        case Cell::Kind::integer: obj[columns[c]] = cell.i; break;
        // Numbers round-trip through the CSV formatting so the two emitters
        // never disagree on a value.
        default: obj[columns[c]] = std::stod(format_double(cell.f, cell.precision)); break;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ArgError("unknown report format '" + s + "' (expected csv or json)");
}

std::string render(const Report& r, ReportFormat f) {
  return f == ReportFormat::csv ? r.to_csv() : r.to_json();
}

uint32_t effective_width(const DenseTensor& t, uint32_t fc_width) {
  if (t.kind == LayerKind::convolutional) {
    // Kernel-row blocks: the natural sharing unit of a convolution is one
    // row of its kernel, which is the last extent.
    return uint32_t(t.shape.back());
  }
  return fc_width;
}

namespace {

std::vector<const DenseTensor*> pick_layers(const std::vector<DenseTensor>& tensors,
                                            const AnalyzeOptions& opts) {
  std::vector<const DenseTensor*> picked;
  for (const DenseTensor& t : tensors)
    if (!opts.fc_only || t.kind == LayerKind::fully_connected) picked.push_back(&t);
  return picked;
}

// Runs the prune+quantize front of the pipeline, yielding the q16 view the
// format experiments consume.
QMatrix pipeline_matrix(const DenseTensor& t, const AnalyzeOptions& opts) {
  if (t.dtype == Dtype::q16) {
    if (opts.prune)
      throw ArgError("tensor '" + t.name + "' is already q16; pruning needs float32 input");
    return flatten_to_matrix(t);
  }
  DenseTensor work = opts.prune ? prune(t, *opts.prune) : t;
  work = quantize(work, resolve_grid(work, opts.quant, opts.prune));
  return flatten_to_matrix(work);
}

}  // namespace

std::vector<LayerReport> analyze_container(const std::vector<DenseTensor>& tensors,
                                           const AnalyzeOptions& opts) {
  auto picked = pick_layers(tensors, opts);
  std::vector<LayerReport> out(picked.size());
  detail::parallel_for(picked.size(), [&](size_t i) {
    const DenseTensor& t = *picked[i];
    out[i] = analyze_layer(t, opts.prune, opts.quant, effective_width(t, opts.fc_width),
                           opts.policy);
  });
  return out;
}

std::vector<SweepResult> sweep_container(const std::vector<DenseTensor>& tensors,
                                         const AnalyzeOptions& opts) {
  auto picked = pick_layers(tensors, opts);
  std::vector<SweepResult> out(picked.size());
  detail::parallel_for(picked.size(), [&](size_t i) {
    const DenseTensor& t = *picked[i];
    out[i] = sweep_block_width(pipeline_matrix(t, opts), opts.widths, opts.policy, t.name);
  });
  return out;
}

std::vector<RoundingComparison> rounding_container(const std::vector<DenseTensor>& tensors,
                                                   const AnalyzeOptions& opts) {
  auto picked = pick_layers(tensors, opts);
  std::vector<RoundingComparison> out(picked.size());
  detail::parallel_for(picked.size(), [&](size_t i) {
    const DenseTensor& t = *picked[i];
    DenseTensor work = opts.prune ? prune(t, *opts.prune) : t;
    QuantGrid grid = resolve_grid(work, opts.quant, opts.prune);
    out[i] = compare_rounding(work, grid, effective_width(t, opts.fc_width), opts.policy);
  });
  return out;
}

Report analyze_report(const std::vector<LayerReport>& layers) {
  Report rep;
  rep.columns = {"layer",  "format", "component",   "bits",
                 "bytes",  "cr_over_bsr", "cr_vs_elem_huffman"};
  auto push = [&rep](const std::string& layer, const char* format, const std::string& component,
                     uint64_t bits, Cell cr_bsr, Cell cr_elem) {
    rep.rows.push_back({Cell::str(layer), Cell::str(format), Cell::str(component),
                        bits_cell(bits), bytes_cell(bits), std::move(cr_bsr),
                        std::move(cr_elem)});
  };
  for (const LayerReport& l : layers) {
    push(l.name, "dense", "total", l.dense_total_bits, Cell::blank(), Cell::blank());
    struct FormatRow {
      const char* label;
      const SizeBreakdown* size;
      Cell cr_bsr, cr_elem;
    };
    const FormatRow formats[] = {
        {"bsr", &l.bsr, Cell::blank(), Cell::blank()},
        {"sbsr", &l.sbsr, Cell::number(l.cr_over_bsr, 4), Cell::number(l.cr_elem_over_sbsr, 4)},
        {"ehuff", &l.ehuff, Cell::blank(), Cell::blank()},
        {"vhuff", &l.vhuff, Cell::blank(), Cell::number(l.cr_elem_over_vec, 4)},
    };
    for (const FormatRow& f : formats) {
      for (const auto& [component, bits] : f.size->components)
        push(l.name, f.label, component, bits, Cell::blank(), Cell::blank());
      push(l.name, f.label, "total", f.size->total_bits, f.cr_bsr, f.cr_elem);
    }
  }
  return rep;
}

Report sweep_report(const std::vector<SweepResult>& sweeps) {
  Report rep;
  rep.columns = {"layer", "width",    "total_bits", "s_idx",
                 "s_flag", "s_ptr",   "s_unique",   "best_width"};
  for (const SweepResult& s : sweeps) {
    for (const WidthCandidate& c : s.candidates) {
      rep.rows.push_back({Cell::str(s.layer), Cell::integer(c.width),
                          Cell::integer(c.size.total_bits),
                          Cell::integer(c.size.component("S_idx")),
                          Cell::integer(c.size.component("S_flag")),
                          Cell::integer(c.size.component("S_block_pointer")),
                          Cell::integer(c.size.component("S_unique_blocks")),
                          Cell::integer(s.best_width)});
    }
  }
  return rep;
}

Report rounding_report(const std::vector<RoundingComparison>& comparisons) {
  Report rep;
  rep.columns = {"layer",
                 "width",
                 "unique_truncate",
                 "unique_nearest",
                 "total_bits_truncate",
                 "total_bits_nearest",
                 "ratio_truncate_over_nearest"};
  for (const RoundingComparison& c : comparisons) {
    Cell ratio = c.total_bits_nearest == 0
                     ? Cell::blank()
                     : Cell::number(double(c.total_bits_truncate) / double(c.total_bits_nearest), 4);
    rep.rows.push_back({Cell::str(c.layer), Cell::integer(c.width),
                        Cell::integer(c.unique_truncate), Cell::integer(c.unique_nearest),
                        Cell::integer(c.total_bits_truncate),
                        Cell::integer(c.total_bits_nearest), std::move(ratio)});
  }
  return rep;
}

Report huffman_report(const std::vector<LayerReport>& layers) {
  Report rep;
  rep.columns = {"layer",
                 "width",
                 "elem_total_bits",
                 "vector_total_bits",
                 "sbsr_total_bits",
                 "cr_vector_huffman",
                 "cr_sbsr"};
  for (const LayerReport& l : layers) {
    rep.rows.push_back({Cell::str(l.name), Cell::integer(l.width),
                        Cell::integer(l.ehuff.total_bits), Cell::integer(l.vhuff.total_bits),
                        Cell::integer(l.sbsr.total_bits),
                        Cell::number(l.cr_elem_over_vec, 4),
                        Cell::number(l.cr_elem_over_sbsr, 4)});
  }
  return rep;
}

}  // namespace wtc
