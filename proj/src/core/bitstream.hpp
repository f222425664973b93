// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace wtc {

// Bit-packed writer, MSB-first within each byte (bit 0 of the stream lands in
// the most significant bit of byte 0). Multi-bit values emit their own most
// significant bit first.
class BitWriter {
 public:
  void put_bit(uint32_t bit) {
    if (bit_len_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= uint8_t(1u << (7 - bit_len_ % 8));
    ++bit_len_;
  }

  void put_bits(uint64_t value, uint32_t n) {
    for (uint32_t i = n; i > 0; --i) put_bit(uint32_t(value >> (i - 1)) & 1u);
  }

  uint64_t bit_length() const { return bit_len_; }
  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
  uint64_t bit_len_ = 0;
};

// Matching reader. Over-reads raise ParseError.
class BitReader {
 public:
  BitReader(const uint8_t* data, uint64_t bit_count) : data_(data), bits_(bit_count) {}

  uint32_t get_bit() {
    if (pos_ >= bits_) throw ParseError("bitstream ended early");
    uint32_t b = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    ++pos_;
    return b;
  }

  uint64_t get_bits(uint32_t n) {
    uint64_t v = 0;
    for (uint32_t i = 0; i < n; ++i) v = (v << 1) | get_bit();
    return v;
  }

  uint64_t position() const { return pos_; }
  uint64_t remaining() const { return bits_ - pos_; }

 private:
  const uint8_t* data_;
  uint64_t bits_;
  uint64_t pos_ = 0;
};

// Little-endian byte writer/reader for fixed-width section fields.
class ByteWriter {
 public:
  void put_u16(uint16_t v) {
    bytes_.push_back(uint8_t(v));
    bytes_.push_back(uint8_t(v >> 8));
  }
  void put_u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(uint8_t(v >> (8 * i)));
  }
  void put_u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(uint8_t(v >> (8 * i)));
  }
  void put_raw(const std::vector<uint8_t>& b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

  size_t size() const { return bytes_.size(); }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint16_t get_u16() {
    need(2);
    uint16_t v = uint16_t(data_[pos_]) | uint16_t(uint16_t(data_[pos_ + 1]) << 8);
    pos_ += 2;
    return v;
  }
  uint32_t get_u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + size_t(i)];
    pos_ += 4;
    return v;
  }
  uint64_t get_u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | data_[pos_ + size_t(i)];
    pos_ += 8;
    return v;
  }
  const uint8_t* get_raw(size_t n) {
    need(n);
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  size_t position() const { return pos_; }
  size_t remaining() const { return size_ - pos_; }

 private:
  void need(size_t n) const {
    if (size_ - pos_ < n) throw ParseError("section ended early");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

}  // namespace wtc
