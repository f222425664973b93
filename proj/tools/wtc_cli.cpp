// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Everything here goes through the public C API in
// wtc/wtc.h; the commands are thin adapters that move bytes between files
// and the library, so their output is identical to direct library calls.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wtc/wtc.h"

namespace {

struct ContainerDel {
  void operator()(wtc_container* c) const { wtc_container_free(c); }
};
struct TensorDel {
  void operator()(wtc_tensor* t) const { wtc_tensor_free(t); }
};
struct ReportDel {
  void operator()(wtc_report* r) const { wtc_report_free(r); }
};
using ContainerPtr = std::unique_ptr<wtc_container, ContainerDel>;
using TensorPtr = std::unique_ptr<wtc_tensor, TensorDel>;
using ReportPtr = std::unique_ptr<wtc_report, ReportDel>;

int fail(const std::string& what) {
  std::cerr << "error: " << what;
  const char* detail = wtc_last_error();
  if (detail != nullptr && *detail != '\0') std::cerr << ": " << detail;
  std::cerr << "\n";
  return 1;
}

#define CLI_CHECK(status, what)              \
  do {                                       \
    if ((status) != WTC_OK) return fail(what); \
  } while (0)

// All flags for every subcommand; each subcommand binds the subset it needs.
struct Flags {
  std::string input;
  std::string output;
  std::string name = "planted";
  uint64_t rows = 64, cols = 64;
  uint32_t block_w = 4;
  uint32_t unique = 8;
  double sparsity = 0.6;
  uint64_t seed = 0;
  uint32_t count = 1;
  bool lenet_shapes = false;

  float threshold = 0.0f;
  double target_sparsity = 0.0;
  bool has_threshold = false;
  bool has_target = false;

  uint32_t bits = 16;
  std::string rounding = "nearest";
  std::string scale = "auto";
  uint32_t width = 4;
  std::vector<uint32_t> widths = {1, 2, 4, 8, 16};
  std::string width_policy = "fixed32";
  std::string format = "sbsr";
  std::string report = "csv";
  bool fc_only = false;
};

ContainerPtr load_input(const Flags& f, int& status_out) {
  wtc_container* raw = nullptr;
  wtc_status st = wtc_container_load(f.input.c_str(), &raw);
  if (st != WTC_OK) {
    status_out = fail("reading '" + f.input + "'");
    return nullptr;
  }
  status_out = 0;
  return ContainerPtr(raw);
}

int write_text(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out || !out.write(text.data(), std::streamsize(text.size())))
    return fail("writing '" + output + "'");
  return 0;
}

int save_output(const wtc_container* c, const std::string& output) {
  CLI_CHECK(wtc_container_save(c, output.c_str()), "writing '" + output + "'");
  return 0;
}

// Translates the flag set into pipeline options for the report commands.
int build_opts(const Flags& f, wtc_pipeline_opts& opts) {
  wtc_pipeline_opts_init(&opts);
  if (f.has_threshold && f.has_target)
    return fail("--threshold and --target-sparsity are mutually exclusive");
  if (f.has_threshold) {
    opts.prune_mode = WTC_PRUNE_THRESHOLD;
    opts.threshold = f.threshold;
  } else if (f.has_target) {
    opts.prune_mode = WTC_PRUNE_TARGET;
    opts.target_sparsity = f.target_sparsity;
  }
  opts.bits = f.bits;
  opts.rounding = f.rounding.c_str();
  if (f.scale == "auto") {
    opts.scale_mode = WTC_SCALE_AUTO;
  } else if (f.scale == "threshold") {
    opts.scale_mode = WTC_SCALE_THRESHOLD;
  } else {
    opts.scale_mode = WTC_SCALE_EXPLICIT;
    try {
      opts.scale = std::stof(f.scale);
    } catch (const std::exception&) {
      return fail("--scale expects auto, threshold, or a number, got '" + f.scale + "'");
    }
  }
  opts.fc_width = f.width;
  opts.width_policy = f.width_policy.c_str();
  opts.fc_only = f.fc_only ? 1 : 0;
  return 0;
}

int run_report(const Flags& f, wtc_status (*make)(const wtc_container*,
                                                  const wtc_pipeline_opts*, wtc_report**)) {
  int status = 0;
  ContainerPtr c = load_input(f, status);
  if (!c) return status;
  wtc_pipeline_opts opts;
  if (int rc = build_opts(f, opts); rc != 0) return rc;
  wtc_report* raw = nullptr;
  CLI_CHECK(make(c.get(), &opts, &raw), "analyzing '" + f.input + "'");
  ReportPtr rep(raw);
  char* text = nullptr;
  CLI_CHECK(wtc_report_render(rep.get(), f.report.c_str(), &text), "rendering report");
  std::string body(text);
  wtc_string_free(text);
  return write_text(body, f.output);
}

int cmd_synth(const Flags& f) {
  ContainerPtr out;
  if (f.lenet_shapes) {
    wtc_container* raw = nullptr;
    CLI_CHECK(wtc_synth_lenet(f.unique, f.sparsity, f.seed, &raw), "generating layers");
    out.reset(raw);
  } else {
    wtc_container* raw = nullptr;
    CLI_CHECK(wtc_container_new(&raw), "creating container");
    out.reset(raw);
    for (uint32_t i = 0; i < f.count; ++i) {
      std::string name = f.count == 1 ? f.name : f.name + std::to_string(i);
      wtc_tensor* t = nullptr;
      CLI_CHECK(wtc_synth_planted(f.rows, f.cols, f.block_w, f.unique, f.sparsity,
                                  f.seed + i, name.c_str(), &t),
                "generating '" + name + "'");
      TensorPtr tp(t);
      CLI_CHECK(wtc_container_add(out.get(), tp.get()), "adding '" + name + "'");
    }
  }
  return save_output(out.get(), f.output);
}

int cmd_prune(const Flags& f) {
  if (!f.has_threshold && !f.has_target)
    return fail("prune needs --threshold or --target-sparsity");
  if (f.has_threshold && f.has_target)
    return fail("--threshold and --target-sparsity are mutually exclusive");
  int status = 0;
  ContainerPtr in = load_input(f, status);
  if (!in) return status;
  wtc_container* raw = nullptr;
  CLI_CHECK(wtc_container_new(&raw), "creating container");
  ContainerPtr out(raw);
  for (size_t i = 0; i < wtc_container_size(in.get()); ++i) {
    wtc_tensor* t = nullptr;
    CLI_CHECK(wtc_container_get(in.get(), i, &t), "reading tensor");
    TensorPtr tp(t);
    wtc_tensor* pruned = nullptr;
    wtc_status st = f.has_threshold
                        ? wtc_prune_threshold(tp.get(), f.threshold, &pruned)
                        : wtc_prune_target(tp.get(), f.target_sparsity, &pruned);
    CLI_CHECK(st, std::string("pruning '") + wtc_tensor_name(tp.get()) + "'");
    TensorPtr pp(pruned);
    CLI_CHECK(wtc_container_add(out.get(), pp.get()), "adding tensor");
  }
  return save_output(out.get(), f.output);
}

int cmd_quantize(const Flags& f) {
  int status = 0;
  ContainerPtr in = load_input(f, status);
  if (!in) return status;
  wtc_container* raw = nullptr;
  CLI_CHECK(wtc_container_new(&raw), "creating container");
  ContainerPtr out(raw);
  for (size_t i = 0; i < wtc_container_size(in.get()); ++i) {
    wtc_tensor* t = nullptr;
    CLI_CHECK(wtc_container_get(in.get(), i, &t), "reading tensor");
    TensorPtr tp(t);
    std::string name = wtc_tensor_name(tp.get());
    float scale = 0.0f;
    if (f.scale == "auto") {
      CLI_CHECK(wtc_default_scale(tp.get(), f.bits, &scale), "scaling '" + name + "'");
    } else if (f.scale == "threshold") {
      if (!f.has_threshold || !(f.threshold > 0.0f))
        return fail("--scale threshold needs a positive --threshold");
      scale = f.threshold;
    } else {
      try {
        scale = std::stof(f.scale);
      } catch (const std::exception&) {
        return fail("--scale expects auto, threshold, or a number, got '" + f.scale + "'");
      }
    }
    wtc_tensor* q = nullptr;
    CLI_CHECK(wtc_quantize(tp.get(), f.bits, scale, f.rounding.c_str(), &q),
              "quantizing '" + name + "'");
    TensorPtr qp(q);
    CLI_CHECK(wtc_container_add(out.get(), qp.get()), "adding tensor");
  }
  return save_output(out.get(), f.output);
}

int cmd_pack(const Flags& f) {
  int status = 0;
  ContainerPtr in = load_input(f, status);
  if (!in) return status;
  CLI_CHECK(wtc_pack(in.get(), f.format.c_str(), f.width, f.output.c_str()),
            "writing '" + f.output + "'");
  return 0;
}

int cmd_unpack(const Flags& f) {
  wtc_container* raw = nullptr;
  CLI_CHECK(wtc_unpack(f.input.c_str(), &raw), "reading '" + f.input + "'");
  ContainerPtr out(raw);
  return save_output(out.get(), f.output);
}

int cmd_sweep(const Flags& f) {
  int status = 0;
  ContainerPtr c = load_input(f, status);
  if (!c) return status;
  wtc_pipeline_opts opts;
  if (int rc = build_opts(f, opts); rc != 0) return rc;
  wtc_report* raw = nullptr;
  CLI_CHECK(wtc_sweep(c.get(), &opts, f.widths.data(), f.widths.size(), &raw),
            "analyzing '" + f.input + "'");
  ReportPtr rep(raw);
  char* text = nullptr;
  CLI_CHECK(wtc_report_render(rep.get(), f.report.c_str(), &text), "rendering report");
  std::string body(text);
  wtc_string_free(text);
  return write_text(body, f.output);
}

void add_prune_flags(CLI::App* cmd, Flags& f) {
  auto* t = cmd->add_option("--threshold", f.threshold, "zero weights with |w| below this");
  auto* s = cmd->add_option("--target-sparsity", f.target_sparsity,
                            "zero the smallest weights until this fraction is zero");
  t->excludes(s);
  s->excludes(t);
  cmd->callback([&f, t, s] {
    f.has_threshold = t->count() > 0;
    f.has_target = s->count() > 0;
  });
}

void add_quant_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--bits", f.bits, "grid bits (2..16)")->capture_default_str();
  cmd->add_option("--rounding", f.rounding, "truncate or nearest")
      ->check(CLI::IsMember({"truncate", "nearest"}))
      ->capture_default_str();
  cmd->add_option("--scale", f.scale, "grid step: auto, threshold, or a number")
      ->capture_default_str();
}

void add_report_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--width", f.width, "block width for fully-connected layers")
      ->capture_default_str();
  cmd->add_option("--width-policy", f.width_policy, "index field widths in size models")
      ->check(CLI::IsMember({"theoretical", "fixed32"}))
      ->capture_default_str();
  cmd->add_option("--report", f.report, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", f.output, "report file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtc: weight-tensor compaction via shared blocks and entropy coding"};
  app.set_version_flag("--version", wtc_version());
  app.require_subcommand(1);
  Flags f;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic weight container");
  synth->add_option("--rows", f.rows, "matrix rows")->capture_default_str();
  synth->add_option("--cols", f.cols, "matrix columns")->capture_default_str();
  synth->add_option("--block-w", f.block_w, "planted block width")->capture_default_str();
  synth->add_option("--unique", f.unique, "distinct nonzero block patterns")
      ->capture_default_str();
  synth->add_option("--sparsity", f.sparsity, "fraction of zero elements")
      ->capture_default_str();
  synth->add_option("--seed", f.seed, "generator seed")->capture_default_str();
  synth->add_option("--count", f.count, "number of tensors")->capture_default_str();
  synth->add_option("--name", f.name, "tensor name (suffixed when --count > 1)")
      ->capture_default_str();
  synth->add_flag("--lenet-shapes", f.lenet_shapes,
                  "generate the four-layer LeNet-5 shaped stack instead");
  synth->add_option("--output,-o", f.output, "container file to write")->required();

  CLI::App* prune = app.add_subcommand("prune", "magnitude-prune every tensor");
  prune->add_option("--input,-i", f.input, "container to read")->required();
  prune->add_option("--output,-o", f.output, "container file to write")->required();
  add_prune_flags(prune, f);

  CLI::App* quantize = app.add_subcommand("quantize", "quantize every tensor to q16");
  quantize->add_option("--input,-i", f.input, "container to read")->required();
  quantize->add_option("--output,-o", f.output, "container file to write")->required();
  quantize->add_option("--threshold", f.threshold,
                       "threshold value for --scale threshold");
  add_quant_flags(quantize, f);
  quantize->callback([&f, quantize] {
    f.has_threshold = quantize->count("--threshold") > 0;
  });

  CLI::App* pack = app.add_subcommand("pack", "serialize q16 tensors into a format");
  pack->add_option("--input,-i", f.input, "container to read")->required();
  pack->add_option("--output,-o", f.output, "packed file to write")->required();
  pack->add_option("--format", f.format, "bsr, sbsr, ehuff, or vhuff")
      ->check(CLI::IsMember({"bsr", "sbsr", "ehuff", "vhuff"}))
      ->capture_default_str();
  pack->add_option("--width", f.width, "block width for fully-connected layers")
      ->capture_default_str();

  CLI::App* unpack = app.add_subcommand("unpack", "decode a packed file back to q16");
  unpack->add_option("--input,-i", f.input, "packed file to read")->required();
  unpack->add_option("--output,-o", f.output, "container file to write")->required();

  CLI::App* analyze = app.add_subcommand("analyze", "per-layer size models and ratios");
  analyze->add_option("--input,-i", f.input, "container to read")->required();
  add_prune_flags(analyze, f);
  add_quant_flags(analyze, f);
  add_report_flags(analyze, f);

  CLI::App* sweep = app.add_subcommand("sweep", "shared-block totals per block width");
  sweep->add_option("--input,-i", f.input, "container to read")->required();
  sweep->add_option("--widths", f.widths, "candidate block widths")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_flag("--fc-only", f.fc_only, "skip convolutional layers");
  add_prune_flags(sweep, f);
  add_quant_flags(sweep, f);
  add_report_flags(sweep, f);

  CLI::App* rounding = app.add_subcommand("compare-rounding",
                                          "truncation vs rounding effect on sharing");
  rounding->add_option("--input,-i", f.input, "container to read")->required();
  add_prune_flags(rounding, f);
  add_quant_flags(rounding, f);
  add_report_flags(rounding, f);

  CLI::App* huffman = app.add_subcommand("compare-huffman",
                                         "element vs vector coding vs shared blocks");
  huffman->add_option("--input,-i", f.input, "container to read")->required();
  add_prune_flags(huffman, f);
  add_quant_flags(huffman, f);
  add_report_flags(huffman, f);

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) return cmd_synth(f);
  if (prune->parsed()) return cmd_prune(f);
  if (quantize->parsed()) return cmd_quantize(f);
  if (pack->parsed()) return cmd_pack(f);
  if (unpack->parsed()) return cmd_unpack(f);
  if (analyze->parsed()) return run_report(f, wtc_analyze);
  if (sweep->parsed()) return cmd_sweep(f);
  if (rounding->parsed()) return run_report(f, wtc_compare_rounding);
  if (huffman->parsed()) return run_report(f, wtc_compare_huffman);
  return fail("no subcommand given");
}
