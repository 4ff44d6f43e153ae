#pragma once
// Sparse oracles: finite, ordered, consistent (key -> reply) maps built up
// during a game run, plus the byte-stable structured-text transcript format.

#include <map>
#include <string>
#include <vector>

#include "owb/bytes.hpp"

namespace owb {

using Key = Bytes;
using Reply = Bytes;

struct SparseOracle {
  std::vector<std::pair<Key, Reply>> entries;  // first-query order
  std::map<Key, Reply> index;

  bool has(const Key& k) const { return index.count(k) != 0; }
  // nullptr when absent
  const Reply* find(const Key& k) const;
  // Inserting an existing key with a different reply throws (consistency);
  // with the same reply it is a no-op.
  void put(const Key& k, const Reply& r);
  size_t size() const { return entries.size(); }
};

// Structured-text transcript: stable field order, hex payloads, no
// timestamps.  Round-trips exactly.
struct Transcript {
  std::string protocol;
  Bytes params;
  SparseOracle oracle;
  std::string outcome;  // single line, e.g. "solved <hex>" / "failure <hex>"

  std::string serialize() const;
  static Transcript parse(std::string_view);
};

}  // namespace owb
