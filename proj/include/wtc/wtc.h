/* Copyright 2026 The wtc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the wtc weight-compaction library.
 *
 * Every object is an opaque handle created and destroyed by this API. Calls
 * that can fail return wtc_status; on failure the out-parameters are left
 * untouched and wtc_last_error() describes what went wrong for the calling
 * thread. Strings accepted for modes are the same tokens the CLI uses:
 * rounding "truncate"/"nearest", width policy "theoretical"/"fixed32",
 * pack formats "bsr"/"sbsr"/"ehuff"/"vhuff", reports "csv"/"json".
 */

#ifndef WTC_WTC_H_
#define WTC_WTC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WTC_API __declspec(dllexport)
#else
#define WTC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wtc_status {
  WTC_OK = 0,
  WTC_ERR_INVALID_ARG = 1, /* bad argument, handle, or coordinate */
  WTC_ERR_IO = 2,          /* filesystem failure */
  WTC_ERR_PARSE = 3,       /* malformed container or section bytes */
  WTC_ERR_RANGE = 4        /* value outside the representable grid */
} wtc_status;

/* Message from this thread's most recent failed call (empty string before
 * any failure). The pointer stays valid until the next failing call. */
WTC_API const char* wtc_last_error(void);

WTC_API const char* wtc_version(void);

typedef struct wtc_container wtc_container; /* ordered set of named tensors */
typedef struct wtc_tensor wtc_tensor;       /* one named weight tensor */
typedef struct wtc_bsr wtc_bsr;             /* block sparse row matrix */
typedef struct wtc_sbsr wtc_sbsr;           /* shared-block sparse row matrix */
typedef struct wtc_encoded wtc_encoded;     /* entropy-coded sparse matrix */
typedef struct wtc_report wtc_report;       /* tabular report */

/* ---- containers ---- */

WTC_API wtc_status wtc_container_new(wtc_container** out);
WTC_API wtc_status wtc_container_load(const char* path, wtc_container** out);
WTC_API wtc_status wtc_container_save(const wtc_container* c, const char* path);
/* Appends a copy of the tensor. Names must stay unique per container. */
WTC_API wtc_status wtc_container_add(wtc_container* c, const wtc_tensor* t);
WTC_API size_t wtc_container_size(const wtc_container* c);
/* Returns an owned copy; release it with wtc_tensor_free. */
WTC_API wtc_status wtc_container_get(const wtc_container* c, size_t index,
                                     wtc_tensor** out);
WTC_API void wtc_container_free(wtc_container* c);

/* ---- tensors ---- */

/* Creates a float32 tensor. kind is "conv" or "fc"; values holds
 * count = product(shape) elements in row-major order. */
WTC_API wtc_status wtc_tensor_create(const char* name, const uint64_t* shape,
                                     size_t rank, const char* kind,
                                     const float* values, size_t count,
                                     wtc_tensor** out);
WTC_API const char* wtc_tensor_name(const wtc_tensor* t);
WTC_API const char* wtc_tensor_dtype(const wtc_tensor* t); /* "float32" | "q16" */
WTC_API const char* wtc_tensor_kind(const wtc_tensor* t);  /* "conv" | "fc" */
WTC_API size_t wtc_tensor_rank(const wtc_tensor* t);
WTC_API wtc_status wtc_tensor_shape(const wtc_tensor* t, uint64_t* out, size_t rank);
WTC_API uint64_t wtc_tensor_element_count(const wtc_tensor* t);
WTC_API float wtc_tensor_scale(const wtc_tensor* t); /* q16 grid step */
WTC_API wtc_status wtc_tensor_read_f32(const wtc_tensor* t, float* out, size_t count);
WTC_API wtc_status wtc_tensor_read_q16(const wtc_tensor* t, int16_t* out, size_t count);
WTC_API void wtc_tensor_free(wtc_tensor* t);

/* ---- synthetic inputs ---- */

/* Planted-redundancy matrix: the nonzero 1 x block_w blocks are drawn from
 * exactly n_unique patterns; about `sparsity` of the elements are zero.
 * Deterministic per seed. */
WTC_API wtc_status wtc_synth_planted(uint64_t rows, uint64_t cols, uint32_t block_w,
                                     uint32_t n_unique, double sparsity, uint64_t seed,
                                     const char* name, wtc_tensor** out);
/* Four planted layers shaped like the LeNet-5 stack. */
WTC_API wtc_status wtc_synth_lenet(uint32_t n_unique, double sparsity, uint64_t seed,
                                   wtc_container** out);

/* ---- pruning and quantization ---- */

WTC_API wtc_status wtc_prune_threshold(const wtc_tensor* t, float threshold,
                                       wtc_tensor** out);
WTC_API wtc_status wtc_prune_target(const wtc_tensor* t, double target_sparsity,
                                    wtc_tensor** out);
/* max|v| / (2^(bits-1) - 1); 1.0 for an all-zero tensor. */
WTC_API wtc_status wtc_default_scale(const wtc_tensor* t, uint32_t bits, float* out);
WTC_API wtc_status wtc_quantize(const wtc_tensor* t, uint32_t bits, float scale,
                                const char* rounding, wtc_tensor** out);

/* ---- sparse block formats (q16 tensors only) ---- */

WTC_API wtc_status wtc_bsr_build(const wtc_tensor* t, uint32_t block_h,
                                 uint32_t block_w, wtc_bsr** out);
WTC_API wtc_status wtc_sbsr_build(const wtc_tensor* t, uint32_t block_h,
                                  uint32_t block_w, wtc_sbsr** out);
WTC_API uint64_t wtc_bsr_block_count(const wtc_bsr* b);
WTC_API uint64_t wtc_sbsr_block_count(const wtc_sbsr* s);
WTC_API uint64_t wtc_sbsr_unique_count(const wtc_sbsr* s);
/* Blocks visited while building (single-scan construction witness). */
WTC_API uint64_t wtc_sbsr_touch_count(const wtc_sbsr* s);
WTC_API wtc_status wtc_bsr_decode(const wtc_bsr* b, const char* name, wtc_tensor** out);
WTC_API wtc_status wtc_sbsr_decode(const wtc_sbsr* s, const char* name, wtc_tensor** out);
/* Copies the block payload at block coordinates into out (count = bh*bw).
 * Unstored in-range blocks yield zeros. */
WTC_API wtc_status wtc_sbsr_get_block(const wtc_sbsr* s, uint64_t block_row,
                                      uint64_t block_col, int16_t* out, size_t count);
/* Rewrites a stored block's payload in place, re-sharing storage. The
 * sparsity pattern is immutable: all-zero payloads and unstored coordinates
 * are rejected. */
WTC_API wtc_status wtc_sbsr_update_block(wtc_sbsr* s, uint64_t block_row,
                                         uint64_t block_col, const int16_t* payload,
                                         size_t count);
/* y = dequant(M) x, float64 accumulation; n = cols, m = rows. */
WTC_API wtc_status wtc_bsr_spmv(const wtc_bsr* b, const double* x, size_t n,
                                double* y, size_t m);
WTC_API wtc_status wtc_sbsr_spmv(const wtc_sbsr* s, const double* x, size_t n,
                                 double* y, size_t m);
WTC_API void wtc_bsr_free(wtc_bsr* b);
WTC_API void wtc_sbsr_free(wtc_sbsr* s);

/* ---- entropy coding (q16 tensors only) ---- */

WTC_API wtc_status wtc_encode_elementwise(const wtc_tensor* t, wtc_encoded** out);
WTC_API wtc_status wtc_encode_vectorwise(const wtc_tensor* t, uint32_t width,
                                         wtc_encoded** out);
WTC_API uint64_t wtc_encoded_payload_bits(const wtc_encoded* e);
WTC_API uint64_t wtc_encoded_dict_entries(const wtc_encoded* e);
WTC_API wtc_status wtc_encoded_decode(const wtc_encoded* e, const char* name,
                                      wtc_tensor** out);
WTC_API void wtc_encoded_free(wtc_encoded* e);

/* ---- size accounting ---- */

#define WTC_BREAKDOWN_MAX_ITEMS 8
#define WTC_BREAKDOWN_NAME_LEN 24

typedef struct wtc_breakdown {
  uint64_t total_bits;
  size_t count;
  struct {
    char name[WTC_BREAKDOWN_NAME_LEN];
    uint64_t bits;
  } items[WTC_BREAKDOWN_MAX_ITEMS];
} wtc_breakdown;

WTC_API wtc_status wtc_size_bsr(const wtc_bsr* b, const char* width_policy,
                                wtc_breakdown* out);
WTC_API wtc_status wtc_size_sbsr(const wtc_sbsr* s, const char* width_policy,
                                 wtc_breakdown* out);
WTC_API wtc_status wtc_size_encoded(const wtc_encoded* e, const char* width_policy,
                                    wtc_breakdown* out);
/* numerator / denominator; zero denominator is an error. */
WTC_API wtc_status wtc_cr_ratio(uint64_t numerator_bits, uint64_t denominator_bits,
                                double* out);

/* ---- pipeline reports ---- */

enum {
  WTC_PRUNE_NONE = 0,
  WTC_PRUNE_THRESHOLD = 1,
  WTC_PRUNE_TARGET = 2
};

enum {
  WTC_SCALE_AUTO = 0,      /* from the value range */
  WTC_SCALE_THRESHOLD = 1, /* grid step = pruning threshold */
  WTC_SCALE_EXPLICIT = 2   /* grid step given in `scale` */
};

typedef struct wtc_pipeline_opts {
  int prune_mode; /* WTC_PRUNE_* */
  float threshold;
  double target_sparsity;
  uint32_t bits;
  int scale_mode; /* WTC_SCALE_* */
  float scale;
  const char* rounding;     /* "truncate" | "nearest" */
  uint32_t fc_width;        /* block width for fully-connected layers */
  const char* width_policy; /* "theoretical" | "fixed32" */
  int fc_only;              /* nonzero: skip convolutional layers */
} wtc_pipeline_opts;

/* Fills the defaults: no pruning, 16 bits, auto scale, nearest rounding,
 * fc_width 4, fixed32 policy, all layers. */
WTC_API void wtc_pipeline_opts_init(wtc_pipeline_opts* opts);

/* Per-layer size models and ratios for dense/BSR/SBSR/element/vector forms. */
WTC_API wtc_status wtc_analyze(const wtc_container* c, const wtc_pipeline_opts* opts,
                               wtc_report** out);
/* Shared-block totals per candidate block width, with the per-layer best.
 * widths may be NULL (n_widths 0) for the default set {1,2,4,8,16}. */
WTC_API wtc_status wtc_sweep(const wtc_container* c, const wtc_pipeline_opts* opts,
                             const uint32_t* widths, size_t n_widths, wtc_report** out);
/* Truncation vs round-to-nearest: unique blocks and totals under each. */
WTC_API wtc_status wtc_compare_rounding(const wtc_container* c,
                                        const wtc_pipeline_opts* opts, wtc_report** out);
/* Element-wise vs vector-wise coding vs shared blocks, with size ratios. */
WTC_API wtc_status wtc_compare_huffman(const wtc_container* c,
                                       const wtc_pipeline_opts* opts, wtc_report** out);
/* Renders to "csv" or "json". *out is heap-allocated; release it with
 * wtc_string_free. */
WTC_API wtc_status wtc_report_render(const wtc_report* r, const char* format, char** out);
WTC_API void wtc_report_free(wtc_report* r);
WTC_API void wtc_string_free(char* s);

/* ---- packed format files ---- */

/* Serializes every tensor (q16 required) into format sections inside a
 * container file. Convolutional layers use their kernel width as the block
 * width, fully-connected layers use fc_width. */
WTC_API wtc_status wtc_pack(const wtc_container* c, const char* format,
                            uint32_t fc_width, const char* path);
/* Reverses wtc_pack, yielding the exact q16 tensors. */
WTC_API wtc_status wtc_unpack(const char* path, wtc_container** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WTC_WTC_H_ */
