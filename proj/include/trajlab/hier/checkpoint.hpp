#pragma once

#include <string>

#include "trajlab/hier/model.hpp"

namespace trajlab::hier {

/// Versioned binary dump of the full state: config header plus every tensor
/// with its name and shape, doubles stored raw so a load round-trips
/// bit-exactly. Throws DataError on malformed or incompatible files.
void save_checkpoint(const std::string& path, const HierState& state);
HierState load_checkpoint(const std::string& path);

}  // namespace trajlab::hier
