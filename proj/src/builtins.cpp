#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bipdo/profile.hpp"
#include "bipdo/symbols.hpp"

namespace bipdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ⟨v⟩² = 1 + |v|² over coordinates [lo, hi).
template <class S>
S bracket_sq(std::span<const S> v, int lo, int hi) {
  S q = S(1.0);
  for (int a = lo; a < hi; ++a) q = q + v[a] * v[a];
  return q;
}

template <class S>
Cx<S> to_cx(const S& v) {
  return Cx<S>(v);
}

// 1 − φ(|v|) over coordinates [lo, hi): vanishes near the origin.
template <class S>
S chi(std::span<const S> v, int lo, int hi) {
  return S(1.0) - varphi_norm<S>(v.data() + lo, hi - lo, 1.0);
}

// (1+|ξ|²)^{m/2}
template <class S>
Cx<S> bessel_formula(std::span<const S> xi, double m) {
  using std::pow;
  return to_cx<S>(pow(bracket_sq<S>(xi, 0, static_cast<int>(xi.size())), 0.5 * m));
}

// ⟨ξ₁⟩^{m1}⟨ξ₂⟩^{m2}
template <class S>
Cx<S> split_bessel(std::span<const S> xi, int n1, double m1, double m2) {
  using std::pow;
  int n = static_cast<int>(xi.size());
  return to_cx<S>(pow(bracket_sq<S>(xi, 0, n1), 0.5 * m1) * pow(bracket_sq<S>(xi, n1, n), 0.5 * m2));
}

// 1 + amp·cos(2π·freq·Σx)
template <class S>
Cx<S> cosine_modulation(std::span<const S> x, double amp, double freq) {
  using std::cos;
  S s = S(0.0);
  for (const auto& v : x) s = s + v;
  return to_cx<S>(S(1.0) + S(amp) * cos(S(kTwoPi * freq) * s));
}

// 1 + xmod·exp(κ Σ(cos 2πx_a − 1)), a periodic (von Mises) bump at the origin
// of angular width ~xwidth.
template <class S>
Cx<S> bump_modulation(std::span<const S> x, double xmod, double xwidth) {
  using std::cos;
  using std::exp;
  double kappa = 1.0 / std::pow(kTwoPi * xwidth, 2);
  S s = S(0.0);
  for (const auto& v : x) s = s + (cos(S(kTwoPi) * v) - S(1.0));
  return to_cx<S>(S(1.0) + S(xmod) * exp(S(kappa) * s));
}

// χ(|ξ|)·e^{i(⟨ξ₁⟩^a + ⟨ξ₂⟩^a)}·⟨ξ⟩^m
template <class S>
Cx<S> exotic_multiplier(std::span<const S> xi, int n1, double a, double m) {
  using std::pow;
  int n = static_cast<int>(xi.size());
  S cut = chi<S>(xi, 0, n);
  if (real_value(cut) == 0.0 && !std::is_same_v<S, Jet>) return Cx<S>(0.0);
  S phase = pow(bracket_sq<S>(xi, 0, n1), 0.5 * a) + pow(bracket_sq<S>(xi, n1, n), 0.5 * a);
  return to_cx<S>(cut) * expi(phase) * to_cx<S>(pow(bracket_sq<S>(xi, 0, n), 0.5 * m));
}

// Π_i χ(|ξ_i|)·e^{i⟨ξ_i⟩^{1/2}}·⟨ξ_i⟩^{m_i}
template <class S>
Cx<S> riemann_multiplier(std::span<const S> xi, int n1, double m1, double m2) {
  using std::pow;
  int n = static_cast<int>(xi.size());
  Cx<S> out = Cx<S>(1.0);
  const int lo[2] = {0, n1}, hi[2] = {n1, n};
  const double ms[2] = {m1, m2};
  for (int f = 0; f < 2; ++f) {
    S q = bracket_sq<S>(xi, lo[f], hi[f]);
    out = out * to_cx<S>(chi<S>(xi, lo[f], hi[f])) * expi(pow(q, 0.25)) * to_cx<S>(pow(q, 0.5 * ms[f]));
  }
  return out;
}

bool near_cutoff_edge(const std::vector<double>& xi, Split split) {
  double r1 = 0.0, r2 = 0.0;
  for (int a = 0; a < split.n(); ++a) (a < split.n1 ? r1 : r2) += xi[a] * xi[a];
  for (double r : {std::sqrt(r1), std::sqrt(r2), std::sqrt(r1 + r2)})
    if (r > 0.9 && r < 2.2) return true;
  return false;
}

struct ParamReader {
  const std::string& name;
  const Params& given;
  const std::vector<std::pair<std::string, std::optional<double>>>& spec;

  double operator()(const std::string& key) const {
    auto it = given.find(key);
    if (it != given.end()) return it->second;
    for (const auto& [k, def] : spec) {
      if (k == key) {
        if (!def) throw std::invalid_argument("builtin '" + name + "': missing required parameter '" + key + "'");
        return *def;
      }
    }
    throw std::logic_error("builtin '" + name + "': undeclared parameter '" + key + "'");
  }
};

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"constant", "sigma = c", {{"c", std::nullopt}, {"rho", 1.0}}},
      {"multiplier_bessel", "sigma = (1+|xi|^2)^{m/2}", {{"m", std::nullopt}, {"rho", 1.0}}},
      {"separable",
       "sigma = (1 + amp cos(2 pi freq sum x)) <xi1>^m1 <xi2>^m2",
       {{"m1", std::nullopt}, {"m2", std::nullopt}, {"amp", 0.5}, {"freq", 1.0}, {"rho", 1.0}}},
      {"oscillatory_exotic",
       "sigma = (1 + xmod vM(x)) chi(|xi|) exp(i(<xi1>^a + <xi2>^a)) <xi>^m, vM a periodic bump of width "
       "xwidth; a defaults to 1 - rho",
       {{"rho", 0.5}, {"m", 0.0}, {"a", std::numeric_limits<double>::quiet_NaN()}, {"xmod", 0.0}, {"xwidth", 0.05}}},
      {"riemann_singularity",
       "sigma = prod_i chi(|xi_i|) exp(i <xi_i>^{1/2}) <xi_i>^{m_i}",
       {{"m1", std::nullopt}, {"m2", std::nullopt}}},
      {"modulated_bessel",
       "sigma = (1 + amp cos(2 pi freq sum x)) (1+|xi|^2)^{m/2}",
       {{"m", std::nullopt}, {"amp", 0.5}, {"freq", 1.0}, {"rho", 1.0}}},
  };
  return catalog;
}

SymbolDescriptor builtin(const std::string& name, const Params& params, Split split, bool checked) {
  const BuiltinInfo* info = nullptr;
  for (const auto& b : builtin_catalog())
    if (b.name == name) info = &b;
  if (!info) throw std::invalid_argument("unknown builtin symbol '" + name + "'");
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const auto& [sk, def] : info->params) known = known || sk == k;
    if (!known) throw std::invalid_argument("builtin '" + name + "': unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("builtin '" + name + "': parameter '" + k + "' not finite");
  }
  ParamReader P{name, params, info->params};
  const int n1 = split.n1;

  SymbolDescriptor s;
  if (name == "constant") {
    cplx c = P("c");
    s = make_multiplier(name, split, SymbolOrder::product(0.0), P("rho"),
                        [c](std::span<const double>) { return c; },
                        [c](std::span<const Jet>, std::span<const Jet>) { return Jet(c); });
  } else if (name == "multiplier_bessel") {
    double m = P("m");
    s = make_multiplier(name, split, SymbolOrder::product(m), P("rho"),
                        [m](std::span<const double> xi) { return bessel_formula<double>(xi, m); },
                        [m](std::span<const Jet>, std::span<const Jet> xi) { return bessel_formula<Jet>(xi, m); });
  } else if (name == "separable") {
    double m1 = P("m1"), m2 = P("m2"), amp = P("amp"), freq = P("freq");
    SeparableTerm t{[amp, freq](std::span<const double> x) { return cosine_modulation<double>(x, amp, freq); },
                    [n1, m1, m2](std::span<const double> xi) { return split_bessel<double>(xi, n1, m1, m2); },
                    amp == 0.0};
    s = make_separable(name, split, SymbolOrder::bi(m1, m2), P("rho"), 0.0, {t},
                       [=](std::span<const Jet> x, std::span<const Jet> xi) {
                         return cosine_modulation<Jet>(x, amp, freq) * split_bessel<Jet>(xi, n1, m1, m2);
                       });
  } else if (name == "oscillatory_exotic") {
    double rho = P("rho"), m = P("m"), xmod = P("xmod"), xw = P("xwidth");
    double a = params.count("a") ? params.at("a") : 1.0 - rho;
    if (!(xw > 0.0)) throw std::invalid_argument("builtin 'oscillatory_exotic': xwidth must be positive");
    XiFunction b = [n1, a, m](std::span<const double> xi) { return exotic_multiplier<double>(xi, n1, a, m); };
    JetEval jb = [=](std::span<const Jet> x, std::span<const Jet> xi) {
      Jet v = exotic_multiplier<Jet>(xi, n1, a, m);
      if (xmod == 0.0) return v;
      return bump_modulation<Jet>(x, xmod, xw) * v;
    };
    if (xmod == 0.0) {
      s = make_multiplier(name, split, SymbolOrder::product(m), rho, b, jb);
    } else {
      SeparableTerm t{[xmod, xw](std::span<const double> x) { return bump_modulation<double>(x, xmod, xw); }, b,
                      false};
      s = make_separable(name, split, SymbolOrder::product(m), rho, 0.0, {t}, jb);
    }
  } else if (name == "riemann_singularity") {
    double m1 = P("m1"), m2 = P("m2");
    s = make_multiplier(
        name, split, SymbolOrder::bi(m1, m2), 0.5,
        [n1, m1, m2](std::span<const double> xi) { return riemann_multiplier<double>(xi, n1, m1, m2); },
        [n1, m1, m2](std::span<const Jet>, std::span<const Jet> xi) {
          return riemann_multiplier<Jet>(xi, n1, m1, m2);
        });
  } else if (name == "modulated_bessel") {
    double m = P("m"), amp = P("amp"), freq = P("freq");
    SeparableTerm t{[amp, freq](std::span<const double> x) { return cosine_modulation<double>(x, amp, freq); },
                    [m](std::span<const double> xi) { return bessel_formula<double>(xi, m); }, amp == 0.0};
    s = make_separable(name, split, SymbolOrder::product(m), P("rho"), 0.0, {t},
                       [=](std::span<const Jet> x, std::span<const Jet> xi) {
                         return cosine_modulation<Jet>(x, amp, freq) * bessel_formula<Jet>(xi, m);
                       });
  }

  if (checked && s.has_oracle()) {
    // Finite differences cannot resolve the cutoffs' flat edges (features of
    // size (|ξ|−1)² near |ξ| = 1), so the comparison skips those shells.
    auto all = ProbeSpec::sample(split, 64.0, 40, 0x5eed);
    ProbeSpec probe;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (!near_cutoff_edge(all.xi[i], split)) probe.add(all.x[i], all.xi[i]);
    int k = admissible_order(split.n());
    double err = oracle_fd_discrepancy(s, probe, k, k);
    if (!(err <= 1e-5)) {
      std::ostringstream os;
      os << "builtin '" << name << "': derivative oracle disagrees with finite differences (" << err << ")";
      throw std::runtime_error(os.str());
    }
  }
  return s;
}

}  // namespace bipdo
