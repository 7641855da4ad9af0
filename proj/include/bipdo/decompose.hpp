#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipdo/grid.hpp"
#include "bipdo/profile.hpp"
#include "bipdo/symbols.hpp"

namespace bipdo {

double varphi(double t);

/// φ_j(ξ) over all coordinates of ξ.
double phi_j(std::span<const double> xi, int j);

int default_ell_max(int N);

/// Cone cutoff in the ratio |ξ₂|/|ξ₁| (taken as +∞ when ξ₁ = 0). Interior
/// indices are dyadic differences of φ; ℓ = ±ℓ_max absorb the tails so the
/// family sums to 1 at every ξ. At ξ = 0 only ℓ = 0 is nonzero.
template <class S>
S delta_ell_t(std::span<const S> xi, Split split, int ell, int ell_max) {
  using std::sqrt;
  if (ell_max < 1) throw std::invalid_argument("delta_ell: ell_max must be >= 1");
  if (ell < -ell_max || ell > ell_max) throw std::invalid_argument("delta_ell: |ell| > ell_max");
  int n = split.n();
  double r1 = 0.0, r2 = 0.0;
  for (int a = 0; a < split.n1; ++a) r1 += real_value(xi[a]) * real_value(xi[a]);
  for (int a = split.n1; a < n; ++a) r2 += real_value(xi[a]) * real_value(xi[a]);
  if (r1 == 0.0 && r2 == 0.0) return S(ell == 0 ? 1.0 : 0.0);
  if (r1 == 0.0) return S(ell == ell_max ? 1.0 : 0.0);
  double ratio_v = std::sqrt(r2 / r1);
  // φ(s·ratio), building the ratio jet only inside the transition band.
  auto f = [&](double s) -> S {
    double t = s * ratio_v;
    if (t <= 1.0) return S(1.0);
    if (t >= 2.0) return S(0.0);
    S q1 = S(0.0), q2 = S(0.0);
    for (int a = 0; a < split.n1; ++a) q1 = q1 + xi[a] * xi[a];
    for (int a = split.n1; a < n; ++a) q2 = q2 + xi[a] * xi[a];
    return varphi_t<S>(S(s) * sqrt(q2 / q1));
  };
  if (ell == ell_max) return S(1.0) - f(std::ldexp(1.0, -ell_max + 1));
  if (ell == -ell_max) return f(std::ldexp(1.0, ell_max));
  return f(std::ldexp(1.0, -ell)) - f(std::ldexp(1.0, -ell + 1));
}

double delta_ell(std::span<const double> xi1, std::span<const double> xi2, int ell, int ell_max);

/// φ^i(x − k) normalized by Σ_l φ^i_0(x − l), with φ^i_0 the tensor product of
/// φ(2·) (1 on [−1/2,1/2]^d, 0 outside (−1,1)^d).
double cube_partition(std::span<const double> x, std::span<const int> k);

enum class DerivedKind { annulus_j, cone_lj, flat_j, sharp_j, low_r, high_r, theta };

const char* to_string(DerivedKind k);
DerivedKind derived_kind_from_string(const std::string& s);

struct DecompositionIndex {
  /// Scalar j (annulus in |ξ|) or a pair (j1, j2) (product of annuli in |ξ₁|, |ξ₂|).
  std::vector<int> j;
  int ell = 0;
  double r = 1.0;
  int ell_max = 0;
};

struct FourierMode {
  std::vector<int> k;  // integer frequency per axis
  cplx coef;           // λ̂ at ξ = k/L (forward-DFT convention)
};

struct Mollifier {
  GridSpec grid;
  DyadicCube cube;
  double rho = 0.0;
  double r = 0.0;  // physical side of the cube
  int M = 0;       // per-axis degree of the Fejér factor
  double scale = 1.0;
  SampledField values;
  std::vector<FourierMode> spectrum;

  /// λ(x) at any x from its finite spectrum.
  cplx operator()(std::span<const double> x) const;
};

class MollifierInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// λ = c·F², F the product of per-axis Fejér kernels of degree M centered at
/// the cube's center, M the largest integer with √n·M/L ≤ r^{−ρ}/2, and c
/// normalizing min_Q λ = 1. Throws MollifierInfeasible when max λ > 10.
Mollifier mollifier_lambda(const GridSpec& grid, const DyadicCube& Q, double rho);

/// Applies a cutoff (or the commutator construction, for theta) to σ. For
/// theta the given symbol is taken as σ¹ and `lambda` is required:
///   θ(x,ζ) = Σ_η λ̂(η) e^{2πi x·η} L^{−n} [σ(x,ζ) − σ(x,ζ+η)].
/// cone_lj, flat_j and sharp_j use φ_j(rξ); flat_j sums ℓ ∈ (j, ℓ_max] and
/// sharp_j sums ℓ ∈ [−ℓ_max, j], so flat_j + sharp_j = σ·φ_j(rξ).
SymbolDescriptor derived_symbol(const SymbolDescriptor& s, DerivedKind kind, const DecompositionIndex& index,
                                const Mollifier* lambda = nullptr);

}  // namespace bipdo
