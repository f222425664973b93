// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0
//
// C shim over the core library: opaque handles in, status codes out. Every
// entry point funnels through guard(), which pins exceptions to statuses and
// stashes the message in a thread-local slot for wtc_last_error().

#include "wtc/wtc.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/accounting.hpp"
#include "core/container.hpp"
#include "core/huffman.hpp"
#include "core/reduce.hpp"
#include "core/report.hpp"
#include "core/serialize.hpp"
#include "core/sparse.hpp"
#include "core/sweep.hpp"
#include "core/synth.hpp"
#include "core/tensor.hpp"

struct wtc_container {
  std::vector<wtc::DenseTensor> tensors;
};
struct wtc_tensor {
  wtc::DenseTensor t;
};
struct wtc_bsr {
  wtc::BsrMatrix m;
};
struct wtc_sbsr {
  wtc::SbsrMatrix m;
};
struct wtc_encoded {
  wtc::EncodedTensor e;
};
struct wtc_report {
  wtc::Report r;
};

namespace {

thread_local std::string g_error;

wtc_status set_error(wtc_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

template <typename Fn>
wtc_status guard(Fn&& fn) {
  try {
    fn();
    return WTC_OK;
  } catch (const wtc::IoError& e) {
    return set_error(WTC_ERR_IO, e.what());
  } catch (const wtc::ParseError& e) {
    return set_error(WTC_ERR_PARSE, e.what());
  } catch (const wtc::RangeError& e) {
    return set_error(WTC_ERR_RANGE, e.what());
  } catch (const std::exception& e) {
    return set_error(WTC_ERR_INVALID_ARG, e.what());
  }
}

wtc_status require(bool ok, const char* what) {
  if (ok) return WTC_OK;
  return set_error(WTC_ERR_INVALID_ARG, std::string("null or invalid ") + what);
}

// Shorthand: bail out with WTC_ERR_INVALID_ARG unless `cond` holds.
#define WTC_REQUIRE(cond, what) \
  do {                          \
    if (!(cond)) return require(false, what); \
  } while (0)

std::string nonnull(const char* s, const char* fallback) { return s ? s : fallback; }

wtc::AnalyzeOptions to_options(const wtc_pipeline_opts* o) {
  wtc::AnalyzeOptions out;
  switch (o->prune_mode) {
    case WTC_PRUNE_NONE:
      break;
    case WTC_PRUNE_THRESHOLD:
      out.prune = wtc::PruneSpec::by_threshold(o->threshold);
      break;
    case WTC_PRUNE_TARGET:
      out.prune = wtc::PruneSpec::by_target(o->target_sparsity);
      break;
    default:
      throw wtc::ArgError("unknown prune mode " + std::to_string(o->prune_mode));
  }
  switch (o->scale_mode) {
    case WTC_SCALE_AUTO:
      out.quant.scale_mode = wtc::ScaleMode::automatic;
      break;
    case WTC_SCALE_THRESHOLD:
      out.quant.scale_mode = wtc::ScaleMode::threshold;
      break;
    case WTC_SCALE_EXPLICIT:
      out.quant.scale_mode = wtc::ScaleMode::explicit_value;
      break;
    default:
      throw wtc::ArgError("unknown scale mode " + std::to_string(o->scale_mode));
  }
  out.quant.bits = o->bits;
  out.quant.scale = o->scale;
  out.quant.rounding = wtc::rounding_from_string(nonnull(o->rounding, "nearest"));
  out.fc_width = o->fc_width;
  out.policy = wtc::width_policy_from_string(nonnull(o->width_policy, "fixed32"));
  out.fc_only = o->fc_only != 0;
  return out;
}

void fill_breakdown(const wtc::SizeBreakdown& in, wtc_breakdown* out) {
  out->total_bits = in.total_bits;
  out->count = in.components.size() < WTC_BREAKDOWN_MAX_ITEMS ? in.components.size()
                                                              : WTC_BREAKDOWN_MAX_ITEMS;
  for (size_t i = 0; i < out->count; ++i) {
    std::snprintf(out->items[i].name, WTC_BREAKDOWN_NAME_LEN, "%s",
                  in.components[i].first.c_str());
    out->items[i].bits = in.components[i].second;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

wtc::QMatrix tensor_matrix(const wtc_tensor* t) { return wtc::flatten_to_matrix(t->t); }

wtc_tensor* matrix_tensor(const wtc::QMatrix& m, const char* name) {
  return new wtc_tensor{
      wtc::tensor_from_matrix(m, name, {m.rows, m.cols}, wtc::LayerKind::fully_connected)};
}

template <typename M>
wtc_status spmv_impl(const M& m, const double* x, size_t n, double* y, size_t rows_out) {
  return guard([&] {
    if (n != m.cols)
      throw wtc::ArgError("x holds " + std::to_string(n) + " elements, matrix has " +
                          std::to_string(m.cols) + " columns");
    if (rows_out != m.rows)
      throw wtc::ArgError("y holds " + std::to_string(rows_out) + " elements, matrix has " +
                          std::to_string(m.rows) + " rows");
    std::vector<double> result = wtc::spmv(m, std::span<const double>(x, n));
    std::memcpy(y, result.data(), result.size() * sizeof(double));
  });
}

}  // namespace

extern "C" {

const char* wtc_last_error(void) { return g_error.c_str(); }

const char* wtc_version(void) { return "1.0.0"; }

/* ---- containers ---- */

wtc_status wtc_container_new(wtc_container** out) {
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = new wtc_container(); });
}

wtc_status wtc_container_load(const char* path, wtc_container** out) {
  WTC_REQUIRE(path, "path");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    auto c = std::make_unique<wtc_container>();
    c->tensors = wtc::load_container(path);
    *out = c.release();
  });
}

wtc_status wtc_container_save(const wtc_container* c, const char* path) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(path, "path");
  return guard([&] { wtc::save_container(c->tensors, path); });
}

wtc_status wtc_container_add(wtc_container* c, const wtc_tensor* t) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(t, "tensor");
  return guard([&] {
    t->t.validate();
    for (const wtc::DenseTensor& existing : c->tensors)
      if (existing.name == t->t.name)
        throw wtc::ArgError("container already holds a tensor named '" + t->t.name + "'");
    c->tensors.push_back(t->t);
  });
}

size_t wtc_container_size(const wtc_container* c) { return c ? c->tensors.size() : 0; }

wtc_status wtc_container_get(const wtc_container* c, size_t index, wtc_tensor** out) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    if (index >= c->tensors.size())
      throw wtc::ArgError("tensor index " + std::to_string(index) + " out of range (" +
                          std::to_string(c->tensors.size()) + " tensors)");
    *out = new wtc_tensor{c->tensors[index]};
  });
}

void wtc_container_free(wtc_container* c) { delete c; }

/* ---- tensors ---- */

wtc_status wtc_tensor_create(const char* name, const uint64_t* shape, size_t rank,
                             const char* kind, const float* values, size_t count,
                             wtc_tensor** out) {
  WTC_REQUIRE(name, "name");
  WTC_REQUIRE(shape && rank > 0, "shape");
  WTC_REQUIRE(kind, "kind");
  WTC_REQUIRE(values || count == 0, "values");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    wtc::DenseTensor t;
    t.name = name;
    t.shape.assign(shape, shape + rank);
    // A bad kind string here is a bad argument, not a parse failure of
    // stored data.
    try {
      t.kind = wtc::layer_kind_from_string(kind);
    } catch (const wtc::Error& e) {
      throw wtc::ArgError(e.what());
    }
    t.dtype = wtc::Dtype::f32;
    t.f32.assign(values, values + count);
    t.validate();
    *out = new wtc_tensor{std::move(t)};
  });
}

const char* wtc_tensor_name(const wtc_tensor* t) { return t ? t->t.name.c_str() : ""; }

const char* wtc_tensor_dtype(const wtc_tensor* t) {
  return t ? wtc::to_string(t->t.dtype) : "";
}

const char* wtc_tensor_kind(const wtc_tensor* t) {
  return t ? wtc::to_string(t->t.kind) : "";
}

size_t wtc_tensor_rank(const wtc_tensor* t) { return t ? t->t.shape.size() : 0; }

wtc_status wtc_tensor_shape(const wtc_tensor* t, uint64_t* out, size_t rank) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    if (rank != t->t.shape.size())
      throw wtc::ArgError("shape buffer holds " + std::to_string(rank) +
                          " extents, tensor has " + std::to_string(t->t.shape.size()));
    std::memcpy(out, t->t.shape.data(), rank * sizeof(uint64_t));
  });
}

uint64_t wtc_tensor_element_count(const wtc_tensor* t) {
  return t ? t->t.element_count() : 0;
}

float wtc_tensor_scale(const wtc_tensor* t) { return t ? t->t.scale : 0.0f; }

wtc_status wtc_tensor_read_f32(const wtc_tensor* t, float* out, size_t count) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    if (t->t.dtype != wtc::Dtype::f32)
      throw wtc::ArgError("tensor '" + t->t.name + "' is not float32");
    if (count != t->t.f32.size())
      throw wtc::ArgError("buffer holds " + std::to_string(count) + " elements, tensor has " +
                          std::to_string(t->t.f32.size()));
    std::memcpy(out, t->t.f32.data(), count * sizeof(float));
  });
}

wtc_status wtc_tensor_read_q16(const wtc_tensor* t, int16_t* out, size_t count) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    if (t->t.dtype != wtc::Dtype::q16)
      throw wtc::ArgError("tensor '" + t->t.name + "' is not q16");
    if (count != t->t.q16.size())
      throw wtc::ArgError("buffer holds " + std::to_string(count) + " elements, tensor has " +
                          std::to_string(t->t.q16.size()));
    std::memcpy(out, t->t.q16.data(), count * sizeof(int16_t));
  });
}

void wtc_tensor_free(wtc_tensor* t) { delete t; }

/* ---- synthetic inputs ---- */

wtc_status wtc_synth_planted(uint64_t rows, uint64_t cols, uint32_t block_w,
                             uint32_t n_unique, double sparsity, uint64_t seed,
                             const char* name, wtc_tensor** out) {
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_tensor{wtc::synth_planted(rows, cols, block_w, n_unique, sparsity,
                                             seed, nonnull(name, "synth"))};
  });
}

wtc_status wtc_synth_lenet(uint32_t n_unique, double sparsity, uint64_t seed,
                           wtc_container** out) {
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    auto c = std::make_unique<wtc_container>();
    c->tensors = wtc::synth_lenet(n_unique, sparsity, seed);
    *out = c.release();
  });
}

/* ---- pruning and quantization ---- */

wtc_status wtc_prune_threshold(const wtc_tensor* t, float threshold, wtc_tensor** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_tensor{wtc::prune(t->t, wtc::PruneSpec::by_threshold(threshold))};
  });
}

wtc_status wtc_prune_target(const wtc_tensor* t, double target_sparsity, wtc_tensor** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_tensor{wtc::prune(t->t, wtc::PruneSpec::by_target(target_sparsity))};
  });
}

wtc_status wtc_default_scale(const wtc_tensor* t, uint32_t bits, float* out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = wtc::default_scale(t->t, bits); });
}

wtc_status wtc_quantize(const wtc_tensor* t, uint32_t bits, float scale,
                        const char* rounding, wtc_tensor** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    wtc::QuantGrid grid;
    grid.bits = bits;
    grid.scale = scale;
    grid.rounding = wtc::rounding_from_string(nonnull(rounding, "nearest"));
    *out = new wtc_tensor{wtc::quantize(t->t, grid)};
  });
}

/* ---- sparse block formats ---- */

wtc_status wtc_bsr_build(const wtc_tensor* t, uint32_t block_h, uint32_t block_w,
                         wtc_bsr** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = new wtc_bsr{wtc::to_bsr(tensor_matrix(t), block_h, block_w)}; });
}

wtc_status wtc_sbsr_build(const wtc_tensor* t, uint32_t block_h, uint32_t block_w,
                          wtc_sbsr** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = new wtc_sbsr{wtc::to_sbsr(tensor_matrix(t), block_h, block_w)}; });
}

uint64_t wtc_bsr_block_count(const wtc_bsr* b) { return b ? b->m.block_count() : 0; }

uint64_t wtc_sbsr_block_count(const wtc_sbsr* s) { return s ? s->m.block_count() : 0; }

uint64_t wtc_sbsr_unique_count(const wtc_sbsr* s) { return s ? s->m.unique_count() : 0; }

uint64_t wtc_sbsr_touch_count(const wtc_sbsr* s) { return s ? s->m.build_touches : 0; }

wtc_status wtc_bsr_decode(const wtc_bsr* b, const char* name, wtc_tensor** out) {
  WTC_REQUIRE(b, "matrix");
  WTC_REQUIRE(name, "name");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = matrix_tensor(wtc::decode(b->m), name); });
}

wtc_status wtc_sbsr_decode(const wtc_sbsr* s, const char* name, wtc_tensor** out) {
  WTC_REQUIRE(s, "matrix");
  WTC_REQUIRE(name, "name");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = matrix_tensor(wtc::decode(s->m), name); });
}

wtc_status wtc_sbsr_get_block(const wtc_sbsr* s, uint64_t block_row, uint64_t block_col,
                              int16_t* out, size_t count) {
  WTC_REQUIRE(s, "matrix");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    if (count != s->m.block_elems())
      throw wtc::ArgError("block buffer holds " + std::to_string(count) +
                          " elements, blocks have " + std::to_string(s->m.block_elems()));
    std::vector<int16_t> payload = wtc::get_block(s->m, block_row, block_col);
    std::memcpy(out, payload.data(), count * sizeof(int16_t));
  });
}

wtc_status wtc_sbsr_update_block(wtc_sbsr* s, uint64_t block_row, uint64_t block_col,
                                 const int16_t* payload, size_t count) {
  WTC_REQUIRE(s, "matrix");
  WTC_REQUIRE(payload, "payload");
  return guard([&] {
    wtc::update_block(s->m, block_row, block_col, std::span<const int16_t>(payload, count));
  });
}

wtc_status wtc_bsr_spmv(const wtc_bsr* b, const double* x, size_t n, double* y, size_t m) {
  WTC_REQUIRE(b, "matrix");
  WTC_REQUIRE(x, "x");
  WTC_REQUIRE(y, "y");
  return spmv_impl(b->m, x, n, y, m);
}

wtc_status wtc_sbsr_spmv(const wtc_sbsr* s, const double* x, size_t n, double* y, size_t m) {
  WTC_REQUIRE(s, "matrix");
  WTC_REQUIRE(x, "x");
  WTC_REQUIRE(y, "y");
  return spmv_impl(s->m, x, n, y, m);
}

void wtc_bsr_free(wtc_bsr* b) { delete b; }

void wtc_sbsr_free(wtc_sbsr* s) { delete s; }

/* ---- entropy coding ---- */

wtc_status wtc_encode_elementwise(const wtc_tensor* t, wtc_encoded** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = new wtc_encoded{wtc::encode_elementwise(tensor_matrix(t))}; });
}

wtc_status wtc_encode_vectorwise(const wtc_tensor* t, uint32_t width, wtc_encoded** out) {
  WTC_REQUIRE(t, "tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = new wtc_encoded{wtc::encode_vectorwise(tensor_matrix(t), width)}; });
}

uint64_t wtc_encoded_payload_bits(const wtc_encoded* e) { return e ? e->e.payload_bits : 0; }

uint64_t wtc_encoded_dict_entries(const wtc_encoded* e) {
  return e ? e->e.codebook.entries.size() : 0;
}

wtc_status wtc_encoded_decode(const wtc_encoded* e, const char* name, wtc_tensor** out) {
  WTC_REQUIRE(e, "encoded tensor");
  WTC_REQUIRE(name, "name");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = matrix_tensor(wtc::decode(e->e), name); });
}

void wtc_encoded_free(wtc_encoded* e) { delete e; }

/* ---- size accounting ---- */

wtc_status wtc_size_bsr(const wtc_bsr* b, const char* width_policy, wtc_breakdown* out) {
  WTC_REQUIRE(b, "matrix");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    fill_breakdown(
        wtc::size_bsr(b->m, wtc::width_policy_from_string(nonnull(width_policy, "fixed32"))),
        out);
  });
}

wtc_status wtc_size_sbsr(const wtc_sbsr* s, const char* width_policy, wtc_breakdown* out) {
  WTC_REQUIRE(s, "matrix");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    fill_breakdown(
        wtc::size_sbsr(s->m, wtc::width_policy_from_string(nonnull(width_policy, "fixed32"))),
        out);
  });
}

wtc_status wtc_size_encoded(const wtc_encoded* e, const char* width_policy,
                            wtc_breakdown* out) {
  WTC_REQUIRE(e, "encoded tensor");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    fill_breakdown(wtc::size_huffman(
                       e->e, wtc::width_policy_from_string(nonnull(width_policy, "fixed32"))),
                   out);
  });
}

wtc_status wtc_cr_ratio(uint64_t numerator_bits, uint64_t denominator_bits, double* out) {
  WTC_REQUIRE(out, "output pointer");
  return guard([&] { *out = wtc::cr_ratio(numerator_bits, denominator_bits); });
}

/* ---- pipeline reports ---- */

void wtc_pipeline_opts_init(wtc_pipeline_opts* opts) {
  if (opts == nullptr) return;
  opts->prune_mode = WTC_PRUNE_NONE;
  opts->threshold = 0.0f;
  opts->target_sparsity = 0.0;
  opts->bits = 16;
  opts->scale_mode = WTC_SCALE_AUTO;
  opts->scale = 0.0f;
  opts->rounding = "nearest";
  opts->fc_width = 4;
  opts->width_policy = "fixed32";
  opts->fc_only = 0;
}

wtc_status wtc_analyze(const wtc_container* c, const wtc_pipeline_opts* opts,
                       wtc_report** out) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(opts, "options");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_report{
        wtc::analyze_report(wtc::analyze_container(c->tensors, to_options(opts)))};
  });
}

wtc_status wtc_sweep(const wtc_container* c, const wtc_pipeline_opts* opts,
                     const uint32_t* widths, size_t n_widths, wtc_report** out) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(opts, "options");
  WTC_REQUIRE(widths || n_widths == 0, "widths");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    wtc::AnalyzeOptions o = to_options(opts);
    if (n_widths > 0) o.widths.assign(widths, widths + n_widths);
    *out = new wtc_report{wtc::sweep_report(wtc::sweep_container(c->tensors, o))};
  });
}

wtc_status wtc_compare_rounding(const wtc_container* c, const wtc_pipeline_opts* opts,
                                wtc_report** out) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(opts, "options");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_report{
        wtc::rounding_report(wtc::rounding_container(c->tensors, to_options(opts)))};
  });
}

wtc_status wtc_compare_huffman(const wtc_container* c, const wtc_pipeline_opts* opts,
                               wtc_report** out) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(opts, "options");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    *out = new wtc_report{
        wtc::huffman_report(wtc::analyze_container(c->tensors, to_options(opts)))};
  });
}

wtc_status wtc_report_render(const wtc_report* r, const char* format, char** out) {
  WTC_REQUIRE(r, "report");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    std::string text =
        wtc::render(r->r, wtc::report_format_from_string(nonnull(format, "csv")));
    char* copy = copy_string(text);
    if (copy == nullptr) throw wtc::IoError("out of memory rendering report");
    *out = copy;
  });
}

void wtc_report_free(wtc_report* r) { delete r; }

void wtc_string_free(char* s) { std::free(s); }

/* ---- packed format files ---- */

wtc_status wtc_pack(const wtc_container* c, const char* format, uint32_t fc_width,
                    const char* path) {
  WTC_REQUIRE(c, "container");
  WTC_REQUIRE(format, "format");
  WTC_REQUIRE(path, "path");
  return guard([&] {
    wtc::pack_container(c->tensors, wtc::pack_format_from_string(format), fc_width, path);
  });
}

wtc_status wtc_unpack(const char* path, wtc_container** out) {
  WTC_REQUIRE(path, "path");
  WTC_REQUIRE(out, "output pointer");
  return guard([&] {
    auto c = std::make_unique<wtc_container>();
    c->tensors = wtc::unpack_container(path);
    *out = c.release();
  });
}

}  // extern "C"
