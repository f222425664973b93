// Copyright 2026 The wtc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/huffman.hpp"

#include <algorithm>
#include <queue>

#include "core/bitstream.hpp"
#include "core/util.hpp"

namespace wtc {
namespace {

struct Node {
  uint64_t freq;
  uint32_t tie;    // leaves: symbol rank; merged nodes: creation order after all leaves
  int32_t left;    // -1 for leaves
  int32_t right;
  uint32_t symbol; // leaf only: rank into the sorted symbol list
};

struct HeapOrder {
  const std::vector<Node>* nodes;
  bool operator()(int32_t a, int32_t b) const {
    const Node& na = (*nodes)[size_t(a)];
    const Node& nb = (*nodes)[size_t(b)];
    if (na.freq != nb.freq) return na.freq > nb.freq;  // min-heap
    return na.tie > nb.tie;
  }
};

void assign_depths(const std::vector<Node>& nodes, int32_t at, uint32_t depth,
                   std::vector<uint8_t>& out) {
  const Node& n = nodes[size_t(at)];
  if (n.left < 0) {
    out[n.symbol] = static_cast<uint8_t>(depth == 0 ? 1 : depth);  // lone symbol: 1 bit
    return;
  }
  assign_depths(nodes, n.left, depth + 1, out);
  assign_depths(nodes, n.right, depth + 1, out);
}

}  // namespace

void Codebook::validate() const {
  if (width == 0) throw ArgError("codebook width must be positive");
  uint64_t kraft_num = 0;  // sum of 2^(64 - len), exact in 128-bit-free arithmetic
  constexpr uint32_t kMaxLen = 57;
  const CodeEntry* prev = nullptr;
  for (const CodeEntry& e : entries) {
    if (e.symbol.size() != width) throw ParseError("codebook symbol width mismatch");
    if (e.length == 0 || e.length > kMaxLen) throw ParseError("codebook code length invalid");
    if (prev != nullptr) {
      bool ordered = prev->length < e.length ||
                     (prev->length == e.length && prev->symbol < e.symbol);
      if (!ordered) throw ParseError("codebook entries are not in canonical order");
    }
    prev = &e;
  }
  // Prefix-freedom and the Kraft sum: compare codes as 57-bit left-aligned
  // intervals; canonical assignment makes intervals adjacent and disjoint.
  uint64_t next_interval = 0;
  for (const CodeEntry& e : entries) {
    uint64_t start = e.code << (kMaxLen - e.length);
    if (start != next_interval) throw ParseError("codebook codes are not canonical");
    next_interval = start + (uint64_t(1) << (kMaxLen - e.length));
    kraft_num += uint64_t(1) << (kMaxLen - e.length);
  }
  if (entries.size() >= 2 && kraft_num != (uint64_t(1) << kMaxLen))
    throw ParseError("codebook is not a complete prefix code");
  if (entries.size() == 1 && entries[0].length != 1)
    throw ParseError("single-symbol codebook must use a 1-bit code");
}

Codebook build_codebook(const FreqMap& freqs, SymbolKind kind, uint32_t width) {
  if (freqs.empty()) throw ArgError("cannot build a code over an empty symbol set");
  if (width == 0) throw ArgError("symbol width must be positive");

  std::vector<const std::vector<int16_t>*> symbols;
  symbols.reserve(freqs.size());
  for (const auto& [sym, count] : freqs) {
    if (sym.size() != width) throw ArgError("symbol width does not match the codebook width");
    if (count == 0) throw ArgError("symbol counts must be positive");
    symbols.push_back(&sym);
  }

  // Huffman merge with deterministic ties: leaf rank == sorted symbol order
  // (FreqMap is ordered), merged nodes take increasing ids afterwards.
  std::vector<Node> nodes;
  nodes.reserve(symbols.size() * 2);
  for (uint32_t i = 0; i < symbols.size(); ++i)
    nodes.push_back(Node{freqs.at(*symbols[i]), i, -1, -1, i});

  HeapOrder order{&nodes};
  std::priority_queue<int32_t, std::vector<int32_t>, HeapOrder> heap(order);
  for (int32_t i = 0; i < int32_t(nodes.size()); ++i) heap.push(i);
  while (heap.size() > 1) {
    int32_t a = heap.top();
    heap.pop();
    int32_t b = heap.top();
    heap.pop();
    nodes.push_back(Node{nodes[size_t(a)].freq + nodes[size_t(b)].freq,
                         uint32_t(nodes.size()), a, b, 0});
    heap.push(int32_t(nodes.size()) - 1);
  }

  std::vector<uint8_t> lengths(symbols.size(), 0);
  assign_depths(nodes, heap.top(), 0, lengths);

  // Canonicalize: (length, symbol) order, counting codes upward.
  std::vector<uint32_t> rank(symbols.size());
  for (uint32_t i = 0; i < rank.size(); ++i) rank[i] = i;
  std::sort(rank.begin(), rank.end(), [&](uint32_t a, uint32_t b) {
    if (lengths[a] != lengths[b]) return lengths[a] < lengths[b];
    return *symbols[a] < *symbols[b];
  });

  Codebook book;
  book.kind = kind;
  book.width = width;
  book.entries.reserve(symbols.size());
  uint64_t code = 0;
  uint8_t prev_len = 0;
  for (uint32_t r : rank) {
    if (prev_len != 0) {
      ++code;
      code <<= (lengths[r] - prev_len);
    }
    prev_len = lengths[r];
    book.entries.push_back(CodeEntry{*symbols[r], code, lengths[r]});
  }
  book.validate();
  return book;
}

namespace {

void check_matrix(const QMatrix& m) {
  if (m.rows == 0 || m.cols == 0) throw ArgError("matrix extents must be positive");
  if (m.values.size() != size_t(m.rows) * m.cols)
    throw ArgError("matrix storage does not match its extents");
}

EncodedTensor encode_symbols(const QMatrix& m, SymbolKind kind, uint32_t width,
                             std::vector<std::pair<Coord, std::vector<int16_t>>>&& items) {
  EncodedTensor e;
  e.kind = kind;
  e.width = width;
  e.rows = m.rows;
  e.cols = m.cols;
  e.scale = m.scale;
  if (items.empty()) return e;  // all-zero matrix: empty dictionary and payload

  FreqMap freqs;
  for (const auto& [coord, sym] : items) ++freqs[sym];
  e.codebook = build_codebook(freqs, kind, width);

  std::map<std::vector<int16_t>, const CodeEntry*> lookup;
  for (const CodeEntry& entry : e.codebook.entries) lookup.emplace(entry.symbol, &entry);

  BitWriter w;
  e.coords.reserve(items.size());
  for (const auto& [coord, sym] : items) {
    e.coords.push_back(coord);
    const CodeEntry* entry = lookup.at(sym);
    w.put_bits(entry->code, entry->length);
  }
  e.payload_bits = w.bit_length();
  e.payload = w.take();
  return e;
}

}  // namespace

EncodedTensor encode_elementwise(const QMatrix& m) {
  check_matrix(m);
  std::vector<std::pair<Coord, std::vector<int16_t>>> items;
  for (uint32_t r = 0; r < m.rows; ++r)
    for (uint32_t c = 0; c < m.cols; ++c) {
      int16_t v = m.at(r, c);
      if (v != 0) items.emplace_back(Coord{r, c}, std::vector<int16_t>{v});
    }
  return encode_symbols(m, SymbolKind::element, 1, std::move(items));
}

EncodedTensor encode_vectorwise(const QMatrix& m, uint32_t width) {
  check_matrix(m);
  if (width == 0) throw ArgError("symbol width must be positive");
  const uint32_t bcols = static_cast<uint32_t>(ceil_div(m.cols, width));
  std::vector<std::pair<Coord, std::vector<int16_t>>> items;
  std::vector<int16_t> tile(width);
  for (uint32_t r = 0; r < m.rows; ++r)
    for (uint32_t bc = 0; bc < bcols; ++bc) {
      bool nonzero = false;
      for (uint32_t j = 0; j < width; ++j) {
        uint64_t c = uint64_t(bc) * width + j;
        tile[j] = c < m.cols ? m.at(r, uint32_t(c)) : int16_t(0);
        nonzero |= (tile[j] != 0);
      }
      if (nonzero) items.emplace_back(Coord{r, bc}, tile);
    }
  return encode_symbols(m, SymbolKind::vector, width, std::move(items));
}

QMatrix decode(const EncodedTensor& e) {
  if (e.rows == 0 || e.cols == 0) throw ParseError("encoded tensor extents must be positive");
  QMatrix m;
  m.rows = e.rows;
  m.cols = e.cols;
  m.scale = e.scale;
  m.values.assign(size_t(e.rows) * e.cols, 0);
  if (e.coords.empty()) {
    if (e.payload_bits != 0) throw ParseError("payload present but no coordinates");
    return m;
  }
  e.codebook.validate();
  if (e.kind != e.codebook.kind || e.width != e.codebook.width)
    throw ParseError("encoded tensor and codebook disagree on symbol shape");

  // Canonical decode: walk bits, matching (length, code) against the sorted
  // entry list via a per-length first-code table.
  uint8_t max_len = 0;
  for (const CodeEntry& entry : e.codebook.entries) max_len = std::max(max_len, entry.length);
  std::vector<std::map<uint64_t, const CodeEntry*>> by_len(size_t(max_len) + 1);
  for (const CodeEntry& entry : e.codebook.entries)
    by_len[entry.length].emplace(entry.code, &entry);

  BitReader r(e.payload.data(), e.payload_bits);
  const uint32_t bw = e.kind == SymbolKind::vector ? e.width : 1;
  for (const Coord& at : e.coords) {
    uint64_t code = 0;
    uint32_t len = 0;
    const CodeEntry* hit = nullptr;
    while (hit == nullptr) {
      if (len >= max_len) throw ParseError("payload holds a code outside the dictionary");
      if (r.remaining() == 0)
        throw ParseError("payload ended before every coordinate was decoded");
      code = (code << 1) | r.get_bit();
      ++len;
      auto it = by_len[len].find(code);
      if (it != by_len[len].end()) hit = it->second;
    }
    if (at.row >= e.rows) throw ParseError("coordinate row out of range");
    uint64_t c0 = uint64_t(at.col) * bw;
    if (c0 >= e.cols) throw ParseError("coordinate column out of range");
    for (uint32_t j = 0; j < bw; ++j) {
      uint64_t c = c0 + j;
      if (c >= e.cols) {
        if (hit->symbol[j] != 0) throw ParseError("nonzero padding past the right edge");
        continue;
      }
      m.values[size_t(at.row) * e.cols + c] = hit->symbol[j];
    }
  }
  if (r.remaining() != 0)
    throw ParseError("payload holds " + std::to_string(r.remaining()) +
                     " undecodable trailing bits");
  return m;
}

}  // namespace wtc
