#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bipdo/jet.hpp"

namespace bipdo {

struct Split {
  int n1 = 1;
  int n2 = 1;
  int n() const { return n1 + n2; }
  bool operator==(const Split&) const = default;
};

/// Declared order: scalar m (product class) or (m1, m2) (bi-parameter class).
struct SymbolOrder {
  bool biparameter = false;
  double m = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;

  static SymbolOrder product(double m) { return {false, m, 0.0, 0.0}; }
  static SymbolOrder bi(double m1, double m2) { return {true, m1 + m2, m1, m2}; }
};

using ScalarEval = std::function<cplx(std::span<const double> x, std::span<const double> xi)>;
using JetEval = std::function<Jet(std::span<const Jet> x, std::span<const Jet> xi)>;
using XFunction = std::function<cplx(std::span<const double> x)>;
using XiFunction = std::function<cplx(std::span<const double> xi)>;

/// One term a(x)·b(ξ) of a separable symbol.
struct SeparableTerm {
  XFunction a;
  XiFunction b;
  bool a_is_one = false;
};

struct SymbolDescriptor {
  std::string name;
  Split split;
  SymbolOrder order;
  double rho = 1.0;
  double delta = 0.0;
  ScalarEval eval;
  /// Same formula instantiated on jets; present when exact derivatives exist.
  JetEval jet;
  /// When non-empty, eval(x, ξ) == Σ_k a_k(x) b_k(ξ).
  std::vector<SeparableTerm> terms;
  bool x_independent = false;

  cplx operator()(std::span<const double> x, std::span<const double> xi) const { return eval(x, xi); }
  bool has_oracle() const { return static_cast<bool>(jet); }
  bool separable() const { return !terms.empty(); }

  /// ∂^α_ξ ∂^β_x σ(x, ξ) from the jet formula. Throws if there is no oracle.
  cplx derivative(std::span<const int> alpha, std::span<const int> beta, std::span<const double> x,
                  std::span<const double> xi) const;
};

/// Validates class parameters and fills defaults; throws std::invalid_argument.
SymbolDescriptor make_symbol(std::string name, Split split, SymbolOrder order, double rho, double delta,
                             ScalarEval eval, JetEval jet = nullptr, std::vector<SeparableTerm> terms = {},
                             bool x_independent = false);

/// x-independent symbol σ(ξ) = b(ξ).
SymbolDescriptor make_multiplier(std::string name, Split split, SymbolOrder order, double rho, XiFunction b,
                                 JetEval jet = nullptr);

/// Σ_k a_k(x) b_k(ξ).
SymbolDescriptor make_separable(std::string name, Split split, SymbolOrder order, double rho, double delta,
                                std::vector<SeparableTerm> terms, JetEval jet = nullptr);

SymbolDescriptor scaled_by(const SymbolDescriptor& s, cplx c);

/// σ(x,ξ)(1+|ξ|²)^α; a product order m becomes m + 2α.
SymbolDescriptor bessel_modulate(const SymbolDescriptor& s, double alpha);

// ---- builtins ----

using Params = std::map<std::string, double>;

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::vector<std::pair<std::string, std::optional<double>>> params;  // nullopt = required
};

const std::vector<BuiltinInfo>& builtin_catalog();

/// Throws std::invalid_argument on an unknown name, unknown parameter key or a
/// missing required parameter. With `checked`, the jet oracle is compared to
/// finite differences at random probes and a mismatch throws.
SymbolDescriptor builtin(const std::string& name, const Params& params, Split split = {},
                         bool checked = false);

// ---- derivative probing and class verification ----

struct ProbeSpec {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> xi;
  /// Base finite-difference step (scaled per axis by the class weights).
  double h0 = 1e-3;
  /// class_ok threshold on the weighted derivative sup.
  double cap = 1e3;

  std::size_t size() const { return x.size(); }
  void add(std::vector<double> xv, std::vector<double> xiv);

  /// ξ = 0, points on each factor's axes, and `count` random points with
  /// log-uniform |ξ| up to xi_cap; x uniform on [0, L)^n.
  static ProbeSpec sample(Split split, double xi_cap, int count, std::uint64_t seed, double L = 1.0);
};

struct Witness {
  std::vector<int> alpha;
  std::vector<int> beta;
  std::vector<double> x;
  std::vector<double> xi;
};

struct SymbolNormReport {
  double seminorm = 0.0;
  int k = 0;
  int N_x = 0;
  Witness worst;
  bool class_ok = false;
  bool used_oracle = false;
};

/// Smallest integer order above n/2.
int admissible_order(int n);

SymbolNormReport seminorm(const SymbolDescriptor& s, const ProbeSpec& probe);

enum class ClassKind { product, biparameter };

/// Class parameters to check against; unset fields come from the descriptor.
/// For a bi-parameter check of a scalar-order symbol, m12 must be given.
struct ClassSpec {
  ClassKind kind = ClassKind::product;
  std::optional<double> m;
  std::optional<std::pair<double, double>> m12;
  std::optional<double> rho;
  std::optional<double> delta;
  std::optional<int> k;
  std::optional<int> N_x;
};

struct ClassCheckResult {
  bool ok = false;
  double margin = 0.0;
  Witness worst;
};

ClassCheckResult class_check(const SymbolDescriptor& s, const ClassSpec& spec, const ProbeSpec& probe);

/// All ∂^α_ξ∂^β_x σ at (x, ξ) with |α| ≤ k, |β| ≤ N_x, ordered like
/// derivative_indices(n, k, N_x). Uses the jet oracle when present and
/// `use_oracle` is set, otherwise Richardson-extrapolated central differences.
std::vector<cplx> derivative_table(const SymbolDescriptor& s, std::span<const double> x,
                                   std::span<const double> xi, int k, int N_x, bool use_oracle,
                                   double h0 = 1e-3);

/// Exponent vectors over 2n variables (ξ_1..ξ_n, then x_1..x_n).
const std::vector<std::vector<int>>& derivative_indices(int n, int k, int N_x);

/// Largest finite-difference error against the jet oracle over the probes.
/// Derivatives are measured in the step units of each axis (ξ_i-axes in units
/// of (1+|ξ_i|)^ρ, x-axes in units of (1+|ξ|)^{−δ}) and the error at a probe
/// is relative to the largest such derivative there.
double oracle_fd_discrepancy(const SymbolDescriptor& s, const ProbeSpec& probe, int k, int N_x);

}  // namespace bipdo
