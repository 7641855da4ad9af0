#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bipdo/battery.hpp"
#include "bipdo/decompose.hpp"
#include "bipdo/operator.hpp"

namespace bipdo {

/// Default power-iteration seed.
constexpr std::uint64_t kPowerSeed = 0x9e3779b97f4a7c15ULL;

struct PowerOptions {
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = kPowerSeed;
};

struct OpNormResult {
  double value = 0.0;  // sqrt of the largest Rayleigh quotient of A*A seen
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on A*A from a seeded Gaussian start.
OpNormResult l2_opnorm(const LinearOperator& A, const PowerOptions& opt = {});
OpNormResult l2_opnorm(const QuantizedOperator& T, const PowerOptions& opt = {});

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares of log2(y) against x. Nonpositive y are skipped.
LogFit fit_log2(const std::vector<double>& x, const std::vector<double>& y);

struct OrthoEntry {
  int j = 0;
  int k = 0;
  double value = 0.0;       // ‖T_j* T_k‖
  double value_star = 0.0;  // ‖T_j T_k*‖
  int iterations = 0;
  bool converged = false;
};

struct OrthoCriteria {
  double min_epsilon = 0.1;
  double min_r2 = 0.8;
  double zero_tol = 1e-10;
};

struct OrthoMatrix {
  int j_lo = 0;
  int j_hi = 0;
  std::vector<OrthoEntry> entries;  // all (j, k) in the range, row-major
  std::vector<double> norms;        // ‖T_j‖ for j = j_lo..j_hi
  double fitted_epsilon = 0.0;
  double fitted_A = 0.0;
  double r2 = 0.0;
  int fit_points = 0;
  double max_far = 0.0;  // max entry over |j−k| ≥ 2
  int nonconverged = 0;
  std::string verdict;  // exact-orthogonal, PASS or FAIL
  bool pass = false;

  const OrthoEntry& at(int j, int k) const;
};

/// Measures ‖T_j*T_k‖ (and ‖T_jT_k*‖) for the annulus pieces T_j of σ and fits
/// A·2^{−ε(j+k)} over the pairs with |j−k| ≥ 2.
OrthoMatrix ortho_experiment(const SymbolDescriptor& s, int j_lo, int j_hi, const GridSpec& grid,
                             const PowerOptions& opt = {}, const OrthoCriteria& crit = {});

struct KernelDecayReport {
  int j = 0;
  double r = 1.0;
  int ell_max = 0;
  std::vector<int> ells;
  std::vector<double> values;  // sup over x samples of the kernel L¹ norm
  std::vector<double> b_list;
  std::vector<std::vector<KernelSplit>> splits;  // [ell][b] at the first x sample
  LogFit fit;                                    // first point dropped
  double target_slope = 0.0;
  double max_slope = 0.0;
  std::string verdict;  // degenerate, PASS or FAIL
  bool pass = false;
};

KernelDecayReport kernel_decay_experiment(const SymbolDescriptor& s, int j, int ell_lo, int ell_hi,
                                          const std::vector<std::vector<double>>& x_samples, const GridSpec& grid,
                                          double r = 1.0, int ell_max = 0, double slope_slack = 0.15,
                                          const std::vector<double>& b_list = {});

struct BoundednessReport {
  std::string id;
  std::string symbol;
  double m = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double p = 2.0;
  std::vector<int> Ns;
  std::vector<double> values;
  std::vector<std::string> witnesses;  // battery element (or iteration note) behind each value
  std::vector<int> iterations;
  LogFit growth_fit;                   // log2 value against log2 N
  double variation = 0.0;              // (max − min)/max over the last three values
  double growth = 0.0;                 // last/first − 1
  bool expected_fail = false;
  std::string verdict;                 // PASS, FAIL, EXPECTED-FAIL, UNEXPECTED-PASS
  bool pass = false;
};

struct SweepCriteria {
  double max_variation = 0.20;
  double min_expected_growth = 0.25;
};

/// ‖T_σ‖_{L²→L²} on each grid of the list.
BoundednessReport l2_uniformity_sweep(const SymbolDescriptor& s, const std::vector<int>& N_list, double L,
                                      bool expected_fail = false, const PowerOptions& opt = {},
                                      const SweepCriteria& crit = {});

/// max over the battery of bmo_norm(T f)/‖f‖_∞ on each grid of the list.
BoundednessReport bmo_experiment(const SymbolDescriptor& s, const std::vector<int>& N_list, double L,
                                 std::uint64_t seed, bool expected_fail = false, const SweepCriteria& crit = {});

struct SharpnessCell {
  double m = 0.0;
  double p = 2.0;
  std::vector<double> values;
  std::vector<std::string> witnesses;
  double exponent = 0.0;
  bool bounded = false;
};

struct SharpnessTable {
  double rho = 0.5;
  Split split;
  std::vector<double> p_list;
  std::vector<double> m_grid;
  std::vector<int> Ns;
  std::vector<SharpnessCell> cells;  // p-major
  double bounded_exponent = 0.05;

  const SharpnessCell& at(std::size_t ip, std::size_t im) const { return cells[ip * m_grid.size() + im]; }
  /// Smallest m marked growing for column ip (NaN if none).
  double flip(std::size_t ip) const;
  /// Verdicts never go from growing back to bounded as m increases.
  bool monotone(std::size_t ip) const;
};

/// For oscillatory_exotic(ρ, m) at each (m, p): max L^p ratio per N over an
/// adversarial battery of grid-scale sign fields, the lacunary sums and the
/// focusing packets; p = ∞ uses bmo_norm(Tf)/‖f‖_∞.
SharpnessTable sharpness_scan(double rho, const std::vector<double>& p_list, const std::vector<double>& m_grid,
                              const std::vector<int>& N_list, double L, std::uint64_t seed, Split split = {});

struct CommutatorReport {
  double max_rel_error = 0.0;
  std::vector<double> errors;
  int M = 0;
  double lambda_max = 0.0;
  double r = 0.0;
  int band = 0;  // battery band limit |k_a| ≤ band
};

/// max over the band-limited battery of ‖λT_{σ¹}f − T_{σ¹}(λf) − T_θ f‖₂/‖f‖₂,
/// σ¹ = high_r(σ) with r the physical side of Q.
CommutatorReport commutator_check(const SymbolDescriptor& s, const GridSpec& grid, const DyadicCube& Q, double rho,
                                  std::uint64_t seed);

struct ConjugationReport {
  double max_rel_error = 0.0;
  int points = 0;
};

/// Compares apply_at(T_j, f, x) with the quantized sum of σ̃_j against Λ_j^{−1}f
/// at s⊙x, T_j the product-annulus piece for the pair j.
ConjugationReport conjugation_check(const SymbolDescriptor& s, const std::vector<int>& j, double rho,
                                    const GridSpec& grid, int points, std::uint64_t seed);

}  // namespace bipdo
