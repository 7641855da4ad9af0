#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bipdo/grid.hpp"
#include "bipdo/symbols.hpp"

namespace bipdo {

enum class Path { dense, separable };

/// T_σ f(x) = Σ_ξ f̂(ξ) σ(x,ξ) e^{2πi x·ξ} L^{−n} over the lattice of `grid`.
class QuantizedOperator {
 public:
  /// Picks the separable path when the symbol carries separable terms.
  QuantizedOperator(SymbolDescriptor symbol, GridSpec grid);
  QuantizedOperator(SymbolDescriptor symbol, GridSpec grid, Path path);

  const SymbolDescriptor& symbol() const { return symbol_; }
  const GridSpec& grid() const { return grid_; }
  Path path() const { return path_; }

  SampledField apply(const SampledField& f) const;
  SampledField adjoint_apply(const SampledField& g) const;
  /// Same quadrature sum at an arbitrary point x.
  cplx apply_at(const SampledField& f, std::span<const double> x) const;

  /// The N^n × N^n matrix of T acting on grid values (row = output point).
  std::vector<cplx> dense_matrix() const;

 private:
  struct Cache;
  void build_cache();

  SymbolDescriptor symbol_;
  GridSpec grid_;
  Path path_;
  std::shared_ptr<Cache> cache_;
};

SampledField apply(const QuantizedOperator& T, const SampledField& f);
SampledField adjoint_apply(const QuantizedOperator& T, const SampledField& g);
cplx apply_at(const QuantizedOperator& T, const SampledField& f, std::span<const double> x);

/// Largest N^n for which the symbol table σ(x_i, ξ_k) is materialized and
/// reused by the dense path.
constexpr std::size_t kDenseTableMaxUnknowns = std::size_t{1} << 11;

// ---- kernels ----

/// K(y) = Σ_ξ σ(x,ξ) e^{−2πi y·ξ} L^{−n} on the grid y-points.
SampledField kernel_slice(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x);
/// Σ_y |K(y)| (L/N)^n.
double kernel_l1(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x);

struct KernelSplit {
  double inner = 0.0;  // |y| ≤ b (periodic distance)
  double outer = 0.0;
};
KernelSplit kernel_l1_split(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x, double b);

// ---- scaling ----

/// Fourier coefficients on a lattice with its own period per axis:
/// f(x) = Σ_k c(k) e^{2πi Σ_a k_a x_a / P_a} / Π_a P_a, k in FFT order.
struct LatticeCoefficients {
  std::vector<double> periods;
  int N = 0;
  std::vector<cplx> values;

  int dims() const { return static_cast<int>(periods.size()); }
  static LatticeCoefficients from_field(const SampledField& f);
  double l2_norm() const;
};

enum class ScaleDirection { forward, inverse };

/// Λ f(x) = f(s ⊙ x) with s_a = 2^{exponent of a's factor} (forward), or
/// f(x / s) (inverse). exponents = (j1 ρ, j2 ρ).
struct ScalingOp {
  std::vector<double> exponents;
  ScaleDirection direction = ScaleDirection::forward;
  Split split;

  std::vector<double> axis_factors() const;
};

ScalingOp scaling_for(const std::vector<int>& j, double rho, Split split,
                      ScaleDirection dir = ScaleDirection::forward);

LatticeCoefficients scaling_apply(const ScalingOp& op, const LatticeCoefficients& c);

/// σ̃(x, ξ) = σ(x / s, s ξ) for the forward scaling factors s.
SymbolDescriptor scaled_symbol(const SymbolDescriptor& s, const ScalingOp& op);

/// Σ_k c(k) σ(x, k/P) e^{2πi x·k/P} / Π P_a at an arbitrary point.
cplx quantized_sum_at(const SymbolDescriptor& s, const LatticeCoefficients& c, std::span<const double> x);

// ---- Bessel potentials ----

/// Multiplier (1+|ξ|²)^{−α}.
SampledField bessel_apply(double alpha, const SampledField& f);

// ---- type-erased operators for norm estimation ----

struct LinearOperator {
  GridSpec grid;
  std::function<SampledField(const SampledField&)> apply;
  std::function<SampledField(const SampledField&)> adjoint;
};

LinearOperator as_linear(const QuantizedOperator& T);
LinearOperator adjoint_of(const LinearOperator& A);
/// A ∘ B.
LinearOperator compose(const LinearOperator& A, const LinearOperator& B);

}  // namespace bipdo
