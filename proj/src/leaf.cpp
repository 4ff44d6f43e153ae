#include "owb/catalog.hpp"

namespace owb::detail {

std::vector<CatalogEntry> leaf_entries() { return {}; }

}  // namespace owb::detail
