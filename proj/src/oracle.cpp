#include "owb/oracle.hpp"

#include <sstream>
#include <stdexcept>

namespace owb {

const Reply* SparseOracle::find(const Key& k) const {
  auto it = index.find(k);
  return it == index.end() ? nullptr : &it->second;
}

void SparseOracle::put(const Key& k, const Reply& r) {
  auto it = index.find(k);
  if (it != index.end()) {
    if (it->second != r)
      throw std::runtime_error("sparse oracle: inconsistent reply for repeated key");
    return;
  }
  index.emplace(k, r);
  entries.emplace_back(k, r);
}

std::string Transcript::serialize() const {
  std::ostringstream os;
  os << "protocol " << protocol << '\n';
  os << "params " << to_hex(params) << '\n';
  for (auto& [k, r] : oracle.entries) os << "entry " << to_hex(k) << ' ' << to_hex(r) << '\n';
  os << "outcome " << outcome << '\n';
  return os.str();
}

Transcript Transcript::parse(std::string_view text) {
  Transcript t;
  std::istringstream is{std::string(text)};
  std::string line;
  bool saw_protocol = false, saw_outcome = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "protocol") {
      ls >> t.protocol;
      saw_protocol = true;
    } else if (tag == "params") {
      std::string h;
      ls >> h;
      t.params = from_hex(h);
    } else if (tag == "entry") {
      std::string k, r;
      ls >> k >> r;
      t.oracle.put(from_hex(k), from_hex(r));
    } else if (tag == "outcome") {
      std::string rest;
      std::getline(ls, rest);
      size_t p = rest.find_first_not_of(' ');
      t.outcome = p == std::string::npos ? "" : rest.substr(p);
      saw_outcome = true;
    } else {
      throw std::runtime_error("transcript parse: unknown field " + tag);
    }
  }
  if (!saw_protocol || !saw_outcome)
    throw std::runtime_error("transcript parse: missing protocol/outcome");
  return t;
}

}  // namespace owb
