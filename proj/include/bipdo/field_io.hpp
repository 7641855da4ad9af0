#pragma once

// Field files.
//
// Binary layout (little-endian): 32-byte header
//   [0,8)   magic "BPDOFLD1"
//   [8,12)  uint32 n1
//   [12,16) uint32 n2
//   [16,20) uint32 N
//   [20,24) uint32 reserved (0)
//   [24,32) float64 L
// followed by N^n complex64 values as (float32 re, float32 im) pairs in the
// SampledField axis order.
//
// JSON layout: {"n1":..,"n2":..,"N":..,"L":..,"re":[..],"im":[..]}.

#include <iosfwd>
#include <string>

#include "bipdo/grid.hpp"

namespace bipdo {

void write_field(std::ostream& os, const SampledField& f);
SampledField read_field(std::istream& is);

std::string field_to_json(const SampledField& f);
SampledField field_from_json(const std::string& text);

/// Dispatches on the extension: ".json" uses the JSON layout, anything else
/// the binary layout.
void save_field(const std::string& path, const SampledField& f);
SampledField load_field(const std::string& path);

}  // namespace bipdo
