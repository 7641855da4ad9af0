#pragma once

// Truncated multivariate Taylor arithmetic with complex coefficients.
//
// A Jet stores the Taylor coefficients c_γ of a function around a point for
// every exponent vector γ of a downward-closed MonomialSet, so that
// ∂^γ f = γ! · c_γ. The builtin symbols are written once as templates over the
// scalar type and instantiated both on double (fast evaluation) and on Jet
// (exact derivatives), which gives every builtin a derivative oracle that is
// independent of finite differences.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bipdo {

using cplx = std::complex<double>;

class MonomialSet {
 public:
  struct Product {
    std::uint32_t a;
    std::uint32_t b;
    std::uint32_t c;
  };

  /// Exponent vectors γ over `group_of_var.size()` variables such that, for
  /// every group g, the total degree of γ restricted to the variables of g is
  /// at most `group_limits[g]`.
  static std::shared_ptr<const MonomialSet> grouped(std::vector<int> group_of_var,
                                                    std::vector<int> group_limits);

  /// Box set: 0 ≤ γ_v ≤ limits[v].
  static std::shared_ptr<const MonomialSet> box(std::vector<int> limits);

  int vars() const { return vars_; }
  std::size_t size() const { return exponents_.size(); }
  int max_degree() const { return max_degree_; }
  const std::vector<int>& exponent(std::size_t i) const { return exponents_[i]; }
  std::optional<std::size_t> index_of(std::span<const int> gamma) const;
  const std::vector<Product>& products() const { return products_; }

 private:
  MonomialSet(int vars, std::vector<std::vector<int>> exponents);

  int vars_ = 0;
  int max_degree_ = 0;
  std::vector<std::vector<int>> exponents_;
  std::vector<std::int64_t> keys_;  // sorted, parallel to key_index_
  std::vector<std::uint32_t> key_index_;
  std::vector<Product> products_;
  std::vector<int> radix_;
};

class Jet {
 public:
  Jet() : c_(1, cplx{}) {}
  Jet(double v) : c_(1, cplx{v, 0.0}) {}  // NOLINT(google-explicit-constructor)
  Jet(cplx v) : c_(1, v) {}               // NOLINT(google-explicit-constructor)

  /// The independent variable `var` at value `at`.
  static Jet variable(std::shared_ptr<const MonomialSet> set, int var, double at);
  static Jet constant(std::shared_ptr<const MonomialSet> set, cplx v);

  cplx value() const { return c_[0]; }
  const std::shared_ptr<const MonomialSet>& set() const { return set_; }
  bool is_scalar() const { return set_ == nullptr; }

  /// Taylor coefficient of monomial γ (0 if γ is outside the set).
  cplx coefficient(std::span<const int> gamma) const;
  /// ∂^γ of the represented function: γ! · coefficient(γ).
  cplx derivative(std::span<const int> gamma) const;

  /// Applies a univariate function given its derivatives at value():
  /// derivs[k] = f^{(k)}(value()), k = 0..max_degree.
  Jet compose(std::span<const cplx> derivs) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(cplx s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  Jet(std::shared_ptr<const MonomialSet> set, std::vector<cplx> c)
      : set_(std::move(set)), c_(std::move(c)) {}
  void promote(const std::shared_ptr<const MonomialSet>& set);

  std::shared_ptr<const MonomialSet> set_;
  std::vector<cplx> c_;
};

Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet pow(const Jet& u, double p);
Jet sqrt(const Jet& u);
Jet cos(const Jet& u);
Jet sin(const Jet& u);
Jet reciprocal(const Jet& u);
Jet expi(const Jet& t);  // e^{i t}

// Glue so that symbol formulas can be written once over S ∈ {double, Jet}.
template <class S>
struct CxOf {
  using type = cplx;
};
template <>
struct CxOf<Jet> {
  using type = Jet;
};
template <class S>
using Cx = typename CxOf<S>::type;

inline double real_value(double v) { return v; }
inline double real_value(const Jet& j) { return j.value().real(); }
inline double abs_real(double v) { return v < 0 ? -v : v; }
inline Jet abs_real(const Jet& j) { return j.value().real() < 0 ? -j : j; }
inline cplx expi(double t) { return std::polar(1.0, t); }
inline double reciprocal(double v) { return 1.0 / v; }

}  // namespace bipdo
