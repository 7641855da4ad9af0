#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bipdo/grid.hpp"
#include "bipdo/symbols.hpp"

namespace bipdo {

struct NamedField {
  std::string name;
  SampledField field;
};

/// Frozen test battery, each field scaled to sup norm 1:
///   8 random ±1 fields, constant on an 8-per-axis block pattern of the torus,
///   4 lacunary sums Σ_k ±e^{2πi 2^k x_a/L}/K along alternating axes, K = log2(N/2),
///   4 trains of 4 translated periodic (von Mises) bumps of growing width.
std::vector<NamedField> standard_battery(const GridSpec& grid, std::uint64_t seed);

/// `count` fields of independent random ±1 values per grid point. Unlike the
/// block patterns of the standard battery these change with N and reach the
/// Nyquist band, which is what growth-in-N probes need.
std::vector<NamedField> grid_sign_fields(const GridSpec& grid, std::uint64_t seed, int count = 8);

/// Packets adapted to an x-independent symbol σ: for each of the two top
/// dyadic bands, the inverse transforms of conj(σ/|σ|)·φ_j and of φ_j.
std::vector<NamedField> focusing_packets(const SymbolDescriptor& s, const GridSpec& grid);

/// Zeroes every Fourier coefficient with |k_a| > kmax on some axis.
SampledField band_limit(const SampledField& f, int kmax);

}  // namespace bipdo
