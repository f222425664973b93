// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/serialize.hpp"

#include <bit>

#include "core/bitstream.hpp"
#include "core/container.hpp"
#include "core/util.hpp"

namespace wtc {
namespace {

void put_u32_array(ByteWriter& w, const std::vector<uint32_t>& v) {
  for (uint32_t x : v) w.put_u32(x);
}

std::vector<uint32_t> get_u32_array(ByteReader& r, size_t n) {
  std::vector<uint32_t> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = r.get_u32();
  return v;
}

void put_i16_array(ByteWriter& w, const int16_t* p, size_t n) {
  for (size_t i = 0; i < n; ++i) w.put_u16(static_cast<uint16_t>(p[i]));
}

std::vector<int16_t> get_i16_array(ByteReader& r, size_t n) {
  std::vector<int16_t> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = static_cast<int16_t>(r.get_u16());
  return v;
}

void expect_consumed(const ByteReader& r, const char* what) {
  if (r.remaining() != 0)
    throw ParseError(std::string(what) + ": " + std::to_string(r.remaining()) +
                     " trailing bytes");
}

}  // namespace

const char* to_string(PackFormat f) {
  switch (f) {
    case PackFormat::bsr: return "bsr";
    case PackFormat::sbsr: return "sbsr";
    case PackFormat::ehuff: return "ehuff";
    default: return "vhuff";
  }
}

PackFormat pack_format_from_string(const std::string& s) {
  if (s == "bsr") return PackFormat::bsr;
  if (s == "sbsr") return PackFormat::sbsr;
  if (s == "ehuff") return PackFormat::ehuff;
  if (s == "vhuff") return PackFormat::vhuff;
  throw ArgError("unknown pack format '" + s + "'");
}

SerializedSection serialize(const BsrMatrix& b) {
  validate_structure(b);
  ByteWriter w;
  w.put_u32(b.rows);
  w.put_u32(b.cols);
  w.put_u32(b.block_h);
  w.put_u32(b.block_w);
  w.put_u32(static_cast<uint32_t>(b.block_count()));
  w.put_u32(std::bit_cast<uint32_t>(b.scale));
  put_u32_array(w, b.row_ptr);
  put_u32_array(w, b.col_idx);
  put_i16_array(w, b.blocks.data(), b.blocks.size());

  SerializedSection out;
  out.body_bits = 32 * (uint64_t(b.row_ptr.size()) + b.block_count()) +
                  16 * b.block_count() * b.block_elems();
  out.bytes = w.take();
  return out;
}

BsrMatrix deserialize_bsr(std::span<const uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  BsrMatrix b;
  b.rows = r.get_u32();
  b.cols = r.get_u32();
  b.block_h = r.get_u32();
  b.block_w = r.get_u32();
  uint32_t count = r.get_u32();
  b.scale = std::bit_cast<float>(r.get_u32());
  if (b.rows == 0 || b.cols == 0 || b.block_h == 0 || b.block_w == 0)
    throw ParseError("bsr section: extents and block dims must be positive");
  b.row_ptr = get_u32_array(r, size_t(b.block_rows()) + 1);
  b.col_idx = get_u32_array(r, count);
  b.blocks = get_i16_array(r, size_t(count) * b.block_elems());
  expect_consumed(r, "bsr section");
  validate_structure(b);
  return b;
}

SerializedSection serialize(const SbsrMatrix& s) {
  validate_structure(s);
  SbsrMatrix::Canonical canon = s.canonical();
  ByteWriter w;
  w.put_u32(s.rows);
  w.put_u32(s.cols);
  w.put_u32(s.block_h);
  w.put_u32(s.block_w);
  w.put_u32(static_cast<uint32_t>(s.block_count()));
  w.put_u32(static_cast<uint32_t>(s.unique_count()));
  w.put_u32(std::bit_cast<uint32_t>(s.scale));
  put_u32_array(w, s.row_ptr);
  put_u32_array(w, s.col_idx);
  w.put_raw(canon.flags);  // 1 bit per stored block, MSB-first, zero-padded
  put_u32_array(w, canon.refs);
  put_i16_array(w, canon.unique_blocks.data(), canon.unique_blocks.size());

  SerializedSection out;
  out.body_bits = 32 * (uint64_t(s.row_ptr.size()) + s.block_count()) +  // index arrays
                  s.block_count() +                                      // flag bits
                  32 * s.repeat_count() +                                // refs
                  16 * s.unique_count() * s.block_elems();
  out.bytes = w.take();
  return out;
}

SbsrMatrix deserialize_sbsr(std::span<const uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  SbsrMatrix s;
  s.rows = r.get_u32();
  s.cols = r.get_u32();
  s.block_h = r.get_u32();
  s.block_w = r.get_u32();
  uint32_t count = r.get_u32();
  uint32_t unique = r.get_u32();
  s.scale = std::bit_cast<float>(r.get_u32());
  if (s.rows == 0 || s.cols == 0 || s.block_h == 0 || s.block_w == 0)
    throw ParseError("sbsr section: extents and block dims must be positive");
  if (unique > count) throw ParseError("sbsr section: more unique blocks than blocks");
  s.row_ptr = get_u32_array(r, size_t(s.block_rows()) + 1);
  s.col_idx = get_u32_array(r, count);
  const uint8_t* flags = r.get_raw(ceil_div(count, 8));
  std::vector<uint32_t> refs = get_u32_array(r, count - unique);
  std::vector<int16_t> unique_blocks = get_i16_array(r, size_t(unique) * s.block_elems());
  expect_consumed(r, "sbsr section");

  // Rebuild the slot store in first-appearance order, checking that every
  // ref points strictly backward into the uniques seen so far.
  size_t next_ref = 0;
  uint32_t uniques_seen = 0;
  s.entry_slot.resize(count);
  for (uint32_t k = 0; k < count; ++k) {
    bool repeat = (flags[k / 8] >> (7 - k % 8)) & 1;
    if (repeat) {
      if (next_ref >= refs.size())
        throw ParseError("sbsr section: more repeat flags than refs");
      uint32_t ref = refs[next_ref++];
      if (ref >= uniques_seen)
        throw ParseError("sbsr section: block " + std::to_string(k) +
                         " references unique " + std::to_string(ref) +
                         " before it is defined");
      s.entry_slot[k] = ref;
      ++s.slot_refs[ref];
    } else {
      if (uniques_seen >= unique)
        throw ParseError("sbsr section: more first flags than unique blocks");
      s.entry_slot[k] = uniques_seen;
      s.slot_refs.push_back(1);
      ++uniques_seen;
    }
  }
  if (uniques_seen != unique || next_ref != refs.size())
    throw ParseError("sbsr section: flag bits disagree with the block counts");
  s.slot_store = std::move(unique_blocks);
  s.live_unique = unique;
  for (uint32_t slot = 0; slot < unique; ++slot) {
    auto payload = s.slot_payload(slot);
    std::vector<int16_t> key(payload.begin(), payload.end());
    if (!s.payload_index.emplace(std::move(key), slot).second)
      throw ParseError("sbsr section: unique blocks are not deduplicated");
  }
  validate_structure(s);
  return s;
}

SerializedSection serialize(const EncodedTensor& e) {
  if (!e.codebook.entries.empty()) e.codebook.validate();
  ByteWriter w;
  w.put_u32(e.rows);
  w.put_u32(e.cols);
  w.put_u32(e.kind == SymbolKind::vector ? 1 : 0);
  w.put_u32(e.width);
  w.put_u32(static_cast<uint32_t>(e.codebook.entries.size()));
  w.put_u32(static_cast<uint32_t>(e.coords.size()));
  w.put_u64(e.payload_bits);
  w.put_u32(std::bit_cast<uint32_t>(e.scale));

  BitWriter dict;
  for (const CodeEntry& entry : e.codebook.entries) {
    dict.put_bits(entry.length, 8);
    dict.put_bits(entry.code, entry.length);
    for (int16_t v : entry.symbol) dict.put_bits(static_cast<uint16_t>(v), 16);
  }
  uint64_t dict_bits = dict.bit_length();
  w.put_raw(dict.bytes());

  for (const Coord& c : e.coords) {
    w.put_u32(c.row);
    w.put_u32(c.col);
  }
  w.put_raw(e.payload);

  SerializedSection out;
  out.body_bits = dict_bits + uint64_t(e.coords.size()) * 64 + e.payload_bits;
  out.bytes = w.take();
  return out;
}

EncodedTensor deserialize_encoded(std::span<const uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  EncodedTensor e;
  e.rows = r.get_u32();
  e.cols = r.get_u32();
  uint32_t kind = r.get_u32();
  if (kind > 1) throw ParseError("encoded section: unknown symbol kind");
  e.kind = kind == 1 ? SymbolKind::vector : SymbolKind::element;
  e.width = r.get_u32();
  uint32_t dict_entries = r.get_u32();
  uint32_t coord_count = r.get_u32();
  e.payload_bits = r.get_u64();
  e.scale = std::bit_cast<float>(r.get_u32());
  if (e.rows == 0 || e.cols == 0)
    throw ParseError("encoded section: extents must be positive");
  if (e.width == 0) throw ParseError("encoded section: width must be positive");
  e.codebook.kind = e.kind;
  e.codebook.width = e.width;

  uint64_t dict_bits = 0;
  {
    // The dictionary is a bitstream; its exact bit length is recomputed from
    // the entry lengths as they stream in.
    uint64_t max_bits = uint64_t(r.remaining()) * 8;
    BitReader d(bytes.data() + r.position(), max_bits);
    for (uint32_t i = 0; i < dict_entries; ++i) {
      CodeEntry entry;
      entry.length = static_cast<uint8_t>(d.get_bits(8));
      if (entry.length == 0) throw ParseError("encoded section: zero code length");
      entry.code = d.get_bits(entry.length);
      entry.symbol.resize(e.width);
      for (uint32_t j = 0; j < e.width; ++j)
        entry.symbol[j] = static_cast<int16_t>(static_cast<uint16_t>(d.get_bits(16)));
      e.codebook.entries.push_back(std::move(entry));
    }
    dict_bits = d.position();
  }
  r.get_raw(ceil_div(dict_bits, 8));  // skip the dictionary's padded bytes
  if (dict_entries > 0) e.codebook.validate();

  e.coords.resize(coord_count);
  for (Coord& c : e.coords) {
    c.row = r.get_u32();
    c.col = r.get_u32();
  }
  const uint8_t* payload = r.get_raw(ceil_div(e.payload_bits, 8));
  e.payload.assign(payload, payload + ceil_div(e.payload_bits, 8));
  expect_consumed(r, "encoded section");
  if ((coord_count == 0) != (dict_entries == 0))
    throw ParseError("encoded section: dictionary and coordinates disagree");
  return e;
}

void pack_container(const std::vector<DenseTensor>& tensors, PackFormat format,
                    uint32_t fc_width, const std::string& path) {
  if (fc_width == 0) throw ArgError("pack: width must be positive");
  std::vector<RawEntry> entries;
  entries.reserve(tensors.size());
  for (const DenseTensor& t : tensors) {
    QMatrix m = flatten_to_matrix(t);  // rejects non-q16 tensors
    uint32_t width = t.kind == LayerKind::convolutional ? m.cols : fc_width;
    SerializedSection section;
    switch (format) {
      case PackFormat::bsr:
        section = serialize(to_bsr(m, 1, width));
        break;
      case PackFormat::sbsr:
        section = serialize(to_sbsr(m, 1, width));
        break;
      case PackFormat::ehuff:
        section = serialize(encode_elementwise(m));
        break;
      case PackFormat::vhuff:
        section = serialize(encode_vectorwise(m, width));
        break;
    }
    RawEntry e;
    e.name = t.name;
    e.shape = t.shape;
    e.dtype = to_string(format);
    e.kind = t.kind;
    e.bytes = std::move(section.bytes);
    entries.push_back(std::move(e));
  }
  write_raw_container(entries, path);
}

std::vector<DenseTensor> unpack_container(const std::string& path) {
  std::vector<RawEntry> entries = read_raw_container(path);
  std::vector<DenseTensor> out;
  out.reserve(entries.size());
  for (const RawEntry& e : entries) {
    QMatrix m;
    if (e.dtype == "bsr") {
      m = decode(deserialize_bsr(e.bytes));
    } else if (e.dtype == "sbsr") {
      m = decode(deserialize_sbsr(e.bytes));
    } else if (e.dtype == "ehuff" || e.dtype == "vhuff") {
      m = decode(deserialize_encoded(e.bytes));
    } else {
      throw ParseError("'" + path + "' tensor '" + e.name + "' has dtype '" + e.dtype +
                       "', which is not a packed format section");
    }
    out.push_back(tensor_from_matrix(m, e.name, e.shape, e.kind));
  }
  return out;
}

}  // namespace wtc
