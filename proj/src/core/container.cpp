// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace wtc {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'W', 'T', 'C', '1'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderBytes = 12;  // magic + u64 manifest length

uint64_t payload_elem_bytes(const std::string& dtype) {
  if (dtype == "float32") return 4;
  if (dtype == "q16") return 2;
  return 0;  // packed sections carry opaque byte lengths
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  in.seekg(0, std::ios::end);
  std::streamoff len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> data(static_cast<size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(data.data()), len);
  if (!in) throw IoError("short read from '" + path + "'");
  return data;
}

uint64_t load_u64le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u64le(uint64_t v, uint8_t* p) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

}  // namespace

std::vector<RawEntry> read_raw_container(const std::string& path) {
  std::vector<uint8_t> data = read_file(path);
  if (data.size() < kHeaderBytes || std::memcmp(data.data(), kMagic, 4) != 0)
    throw ParseError("'" + path + "' is not a weight container (bad magic)");
  uint64_t manifest_len = load_u64le(data.data() + 4);
  if (manifest_len > data.size() - kHeaderBytes)
    throw ParseError("'" + path + "' manifest length exceeds file size");

  json manifest;
  try {
    manifest = json::parse(data.begin() + kHeaderBytes,
                           data.begin() + kHeaderBytes + manifest_len);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' has a malformed manifest: " + e.what());
  }

  const size_t payload_base = kHeaderBytes + static_cast<size_t>(manifest_len);
  const uint64_t payload_size = data.size() - payload_base;

  try {
    if (manifest.at("version").get<uint32_t>() != kVersion)
      throw ParseError("'" + path + "' has unsupported container version");
    if (manifest.at("endianness").get<std::string>() != "little")
      throw ParseError("'" + path + "' declares a non-little-endian payload");

    std::vector<RawEntry> entries;
    std::set<std::string> names;
    std::vector<std::pair<uint64_t, uint64_t>> spans;  // offset, length
    for (const json& jt : manifest.at("tensors")) {
      RawEntry e;
      e.name = jt.at("name").get<std::string>();
      if (!names.insert(e.name).second)
        throw ParseError("'" + path + "' contains duplicate tensor name '" + e.name + "'");
      e.shape = jt.at("shape").get<std::vector<uint64_t>>();
      e.dtype = jt.at("dtype").get<std::string>();
      e.kind = layer_kind_from_string(jt.at("kind").get<std::string>());
      if (jt.contains("scale_bits")) e.scale_bits = jt.at("scale_bits").get<uint32_t>();

      uint64_t offset = jt.at("offset").get<uint64_t>();
      uint64_t length = jt.at("length").get<uint64_t>();
      if (offset > payload_size || length > payload_size - offset)
        throw ParseError("'" + path + "' payload for tensor '" + e.name +
                         "' is truncated (needs bytes " + std::to_string(offset) + ".." +
                         std::to_string(offset + length) + " at file offset " +
                         std::to_string(payload_base + offset) + ")");
      spans.emplace_back(offset, length);
      e.bytes.assign(data.begin() + payload_base + offset,
                     data.begin() + payload_base + offset + length);
      entries.push_back(std::move(e));
    }

    std::vector<size_t> order(spans.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return spans[a].first < spans[b].first; });
    for (size_t i = 1; i < order.size(); ++i) {
      const auto& prev = spans[order[i - 1]];
      const auto& cur = spans[order[i]];
      if (prev.first + prev.second > cur.first)
        throw ParseError("'" + path + "' payloads of tensors '" + entries[order[i - 1]].name +
                         "' and '" + entries[order[i]].name + "' overlap");
    }
    return entries;
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' has a malformed manifest: " + e.what());
  }
}

void write_raw_container(const std::vector<RawEntry>& entries, const std::string& path) {
  std::set<std::string> names;
  for (const RawEntry& e : entries) {
    if (e.name.empty()) throw ArgError("container entry has an empty name");
    if (!names.insert(e.name).second)
      throw ArgError("duplicate tensor name '" + e.name + "' in container");
  }

  json tensors = json::array();
  uint64_t offset = 0;
  for (const RawEntry& e : entries) {
    json jt;
    jt["name"] = e.name;
    jt["shape"] = e.shape;
    jt["dtype"] = e.dtype;
    jt["kind"] = std::string(to_string(e.kind));
    if (e.dtype == "q16") jt["scale_bits"] = e.scale_bits;
    jt["offset"] = offset;
    jt["length"] = e.bytes.size();
    tensors.push_back(std::move(jt));
    offset += e.bytes.size();
  }
  json manifest;
  manifest["version"] = kVersion;
  manifest["endianness"] = "little";
  manifest["tensors"] = std::move(tensors);
  const std::string text = manifest.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  uint8_t len_bytes[8];
  store_u64le(text.size(), len_bytes);
  out.write(reinterpret_cast<const char*>(len_bytes), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const RawEntry& e : entries)
    out.write(reinterpret_cast<const char*>(e.bytes.data()),
              static_cast<std::streamsize>(e.bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<DenseTensor> load_container(const std::string& path) {
  std::vector<RawEntry> entries = read_raw_container(path);
  std::vector<DenseTensor> tensors;
  tensors.reserve(entries.size());
  for (RawEntry& e : entries) {
    uint64_t elem_bytes = payload_elem_bytes(e.dtype);
    if (elem_bytes == 0)
      throw ParseError("'" + path + "' tensor '" + e.name + "' has unknown dtype '" +
                       e.dtype + "' (expected float32 or q16)");
    DenseTensor t;
    t.name = e.name;
    t.shape = e.shape;
    t.kind = e.kind;
    uint64_t n = 1;
    for (uint64_t d : t.shape) n *= d;
    if (t.shape.empty() || e.bytes.size() != n * elem_bytes)
      throw ParseError("'" + path + "' tensor '" + e.name +
                       "' payload length does not match its shape");
    if (e.dtype == "float32") {
      t.dtype = Dtype::f32;
      t.f32.resize(n);
      for (uint64_t i = 0; i < n; ++i) {
        uint32_t bits = uint32_t(e.bytes[4 * i]) | uint32_t(e.bytes[4 * i + 1]) << 8 |
                        uint32_t(e.bytes[4 * i + 2]) << 16 | uint32_t(e.bytes[4 * i + 3]) << 24;
        t.f32[i] = std::bit_cast<float>(bits);
      }
    } else {
      t.dtype = Dtype::q16;
      t.scale = std::bit_cast<float>(e.scale_bits);
      t.q16.resize(n);
      for (uint64_t i = 0; i < n; ++i) {
        uint16_t bits = uint16_t(e.bytes[2 * i]) | uint16_t(uint16_t(e.bytes[2 * i + 1]) << 8);
        t.q16[i] = static_cast<int16_t>(bits);
      }
    }
    t.validate();
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void save_container(const std::vector<DenseTensor>& tensors, const std::string& path) {
  std::vector<RawEntry> entries;
  entries.reserve(tensors.size());
  for (const DenseTensor& t : tensors) {
    t.validate();
    RawEntry e;
    e.name = t.name;
    e.shape = t.shape;
    e.dtype = to_string(t.dtype);
    e.kind = t.kind;
    if (t.dtype == Dtype::f32) {
      e.bytes.resize(t.f32.size() * 4);
      for (size_t i = 0; i < t.f32.size(); ++i) {
        uint32_t bits = std::bit_cast<uint32_t>(t.f32[i]);
        e.bytes[4 * i] = static_cast<uint8_t>(bits);
        e.bytes[4 * i + 1] = static_cast<uint8_t>(bits >> 8);
        e.bytes[4 * i + 2] = static_cast<uint8_t>(bits >> 16);
        e.bytes[4 * i + 3] = static_cast<uint8_t>(bits >> 24);
      }
    } else {
      e.scale_bits = std::bit_cast<uint32_t>(t.scale);
      e.bytes.resize(t.q16.size() * 2);
      for (size_t i = 0; i < t.q16.size(); ++i) {
        uint16_t bits = static_cast<uint16_t>(t.q16[i]);
        e.bytes[2 * i] = static_cast<uint8_t>(bits);
        e.bytes[2 * i + 1] = static_cast<uint8_t>(bits >> 8);
      }
    }
    entries.push_back(std::move(e));
  }
  write_raw_container(entries, path);
}

}  // namespace wtc
