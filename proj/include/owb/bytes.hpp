#pragma once
// Small byte-string serialization helpers: length-prefixed, varint-based,
// deterministic. Used for canonical query keys and transcript payloads.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace owb {

using Bytes = std::string;

struct ByteWriter {
  Bytes out;
  void u8(uint8_t v) { out.push_back(static_cast<char>(v)); }
  void varint(uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<uint8_t>(v) | 0x80);
      v >>= 7;
    }
    u8(static_cast<uint8_t>(v));
  }
  void str(std::string_view s) {
    varint(s.size());
    out.append(s.data(), s.size());
  }
};

struct ByteReader {
  std::string_view in;
  size_t pos = 0;
  explicit ByteReader(std::string_view s) : in(s) {}
  bool done() const { return pos == in.size(); }
  uint8_t u8() {
    if (pos >= in.size()) throw std::runtime_error("byte reader: truncated input");
    return static_cast<uint8_t>(in[pos++]);
  }
  uint64_t varint() {
    uint64_t v = 0;
    int shift = 0;
    for (;;) {
      uint8_t b = u8();
      v |= static_cast<uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
      shift += 7;
      if (shift > 63) throw std::runtime_error("byte reader: varint overflow");
    }
  }
  std::string str() {
    uint64_t n = varint();
    if (pos + n > in.size()) throw std::runtime_error("byte reader: truncated string");
    std::string s(in.substr(pos, n));
    pos += n;
    return s;
  }
};

inline std::string to_hex(std::string_view s) {
  static const char* d = "0123456789abcdef";
  std::string h;
  h.reserve(s.size() * 2);
  for (unsigned char c : s) {
    h.push_back(d[c >> 4]);
    h.push_back(d[c & 15]);
  }
  return h;
}

inline std::string from_hex(std::string_view h) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::runtime_error("bad hex digit");
  };
  if (h.size() % 2) throw std::runtime_error("odd hex length");
  std::string s;
  s.reserve(h.size() / 2);
  for (size_t i = 0; i < h.size(); i += 2)
    s.push_back(static_cast<char>(nib(h[i]) * 16 + nib(h[i + 1])));
  return s;
}

// Stable 64-bit hash (FNV-1a); used for deterministic seeded choices.
inline uint64_t fnv1a(std::string_view s, uint64_t seed = 1469598103934665603ull) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace owb
