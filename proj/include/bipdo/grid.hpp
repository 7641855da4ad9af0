#pragma once

// Periodic grids on the torus (ℝ/Lℤ)^{n1+n2}, sampled fields, discrete Fourier
// transforms and norms.
//
// Axis order: the n1 axes of the first factor come first, then the n2 axes of
// the second factor; values are row-major (last axis fastest). Spectral arrays
// use the same layout in FFT order: index i on an axis is the integer
// frequency k = i for i < N/2 and k = i − N otherwise, i.e. ξ = k/L.

#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bipdo {

using cplx = std::complex<double>;

struct GridSpec {
  int n1 = 1;
  int n2 = 1;
  int N = 0;
  double L = 1.0;

  int n() const { return n1 + n2; }
  std::size_t size() const;
  double dx() const { return L / N; }
  /// Quadrature weight (L/N)^n.
  double cell_volume() const;
  /// Integer frequency of spectral index i on one axis.
  int freq_of_index(int i) const { return i < N / 2 ? i : i - N; }
  int index_of_freq(int k) const { return ((k % N) + N) % N; }
  /// Multi-index (one entry per axis) of flat index `flat`.
  void unflatten(std::size_t flat, int* idx) const;
  std::size_t flatten(const int* idx) const;
  /// Physical coordinates of grid point `flat`.
  void point(std::size_t flat, double* x) const;
  /// Lattice frequency (k/L per axis) of spectral index `flat`.
  void frequency(std::size_t flat, double* xi) const;

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int n1, int n2, int N, double L);

struct SampledField {
  GridSpec grid;
  std::vector<cplx> values;

  SampledField() = default;
  explicit SampledField(const GridSpec& g) : grid(g), values(g.size(), cplx{}) {}
  SampledField(const GridSpec& g, std::vector<cplx> v);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// f̂(ξ) = Σ_x f(x) e^{−2πi x·ξ} (L/N)^n.
SampledField dft_forward(const SampledField& f);
/// f(x) = Σ_ξ f̂(ξ) e^{+2πi x·ξ} (1/L)^n.
SampledField dft_inverse(const SampledField& fhat);

/// Unnormalized in-place transform over all axes of the grid; sign −1 is the
/// e^{−2πi} kernel. Thread-safe.
void fft_inplace(const GridSpec& g, cplx* data, int sign);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (Σ|f|^p (L/N)^n)^{1/p}, or max|f| for p = ∞.
double lp_norm(const SampledField& f, double p);

struct DyadicCube {
  std::vector<int> anchor;
  int side = 1;
};

/// Mean of |f − f_Q| over the grid points of Q (periodic indexing).
double mean_oscillation(const SampledField& f, const DyadicCube& q);

/// Sup of mean_oscillation over all cubes with power-of-two side and every
/// lattice anchor (cubes wrap around the torus).
double bmo_norm(const SampledField& f);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

}  // namespace bipdo
