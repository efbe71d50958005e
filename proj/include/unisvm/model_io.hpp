#pragma once

#include <iosfwd>
#include <string>

#include "unisvm/solver.hpp"

namespace unisvm {

/// Versioned model container. The default binary layout has a "USVM" magic
/// header and raw little-endian 64-bit floats, so scores round-trip bitwise;
/// the text format is a human-readable equivalent using 17-significant-digit
/// decimals (also exact for doubles).
void save_model(const Model& model, const std::string& path,
                bool text_format = false);
Model load_model(const std::string& path);

void write_model(const Model& model, std::ostream& out, bool text_format);
Model read_model(std::istream& in);

}  // namespace unisvm
