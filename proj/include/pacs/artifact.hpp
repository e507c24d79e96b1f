#pragma once

#include <cstdint>
#include <string>

#include "pacs/hjb_solver.hpp"

namespace pacs {

/// Versioned binary value-field artifact: magic "PACF", format version,
/// model hash, grid header, theta table, then the phi/policy arrays as raw
/// little-endian doubles in (t, w, y) order.
void save_field(const std::string& path, const ValueField& field, std::uint64_t model_hash);

struct LoadedField {
    ValueField field;
    std::uint64_t model_hash = 0;
};

/// Throws ParseError on malformed input. Hash checking is the caller's job
/// (the CLI compares against the config's model hash and exits 4 on drift).
LoadedField load_field(const std::string& path);

}  // namespace pacs
