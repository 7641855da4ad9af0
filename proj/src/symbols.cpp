#include "bipdo/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bipdo {

namespace {

std::shared_ptr<const MonomialSet> derivative_set(int n, int k, int N_x) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const MonomialSet>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple(n, k, N_x);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<int> groups(2 * n, 0);
  for (int a = n; a < 2 * n; ++a) groups[a] = 1;
  auto set = MonomialSet::grouped(groups, {k, N_x});
  cache.emplace(key, set);
  return set;
}

double factor_norm(std::span<const double> xi, int lo, int hi) {
  double s = 0.0;
  for (int a = lo; a < hi; ++a) s += xi[a] * xi[a];
  return std::sqrt(s);
}

std::string describe_point(std::span<const double> x, std::span<const double> xi) {
  std::ostringstream os;
  os << "x=(";
  for (std::size_t a = 0; a < x.size(); ++a) os << (a ? "," : "") << x[a];
  os << ") xi=(";
  for (std::size_t a = 0; a < xi.size(); ++a) os << (a ? "," : "") << xi[a];
  os << ")";
  return os.str();
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Natural length scales per variable (ξ-axes then x-axes).
std::vector<double> axis_scales(const SymbolDescriptor& s, std::span<const double> xi) {
  int n = s.split.n();
  double r1 = factor_norm(xi, 0, s.split.n1), r2 = factor_norm(xi, s.split.n1, n);
  double r = std::hypot(r1, r2);
  std::vector<double> h(2 * n);
  for (int a = 0; a < n; ++a) h[a] = std::pow(1.0 + (a < s.split.n1 ? r1 : r2), s.rho);
  for (int a = 0; a < n; ++a) h[n + a] = 1.0 / std::pow(1.0 + r, s.delta);
  return h;
}

cplx central_difference(const SymbolDescriptor& s, std::span<const double> x, std::span<const double> xi,
                        const std::vector<int>& gamma, const std::vector<double>& step) {
  int n = s.split.n();
  std::vector<int> vars;
  for (int v = 0; v < 2 * n; ++v)
    if (gamma[v] > 0) vars.push_back(v);
  std::vector<double> px(x.begin(), x.end()), pxi(xi.begin(), xi.end());
  std::vector<int> off(vars.size(), 0);
  cplx acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t t = 0; t < vars.size(); ++t) {
      int v = vars[t], g = gamma[v], o = off[t];
      double shift = (0.5 * g - o) * step[v];
      if (v < n)
        pxi[v] = xi[v] + shift;
      else
        px[v - n] = x[v - n] + shift;
      w *= ((o % 2) ? -1.0 : 1.0) * binomial(g, o) / std::pow(step[v], g);
    }
    acc += w * s.eval(px, pxi);
    std::size_t t = 0;
    for (; t < vars.size(); ++t) {
      if (++off[t] <= gamma[vars[t]]) break;
      off[t] = 0;
    }
    if (t == vars.size()) break;
  }
  return acc;
}

}  // namespace

cplx SymbolDescriptor::derivative(std::span<const int> alpha, std::span<const int> beta,
                                  std::span<const double> x, std::span<const double> xi) const {
  if (!jet) throw std::logic_error("symbol '" + name + "' has no derivative oracle");
  int n = split.n();
  int ka = 0, kb = 0;
  for (int a : alpha) ka += a;
  for (int b : beta) kb += b;
  auto set = derivative_set(n, ka, kb);
  std::vector<Jet> jx, jxi;
  for (int a = 0; a < n; ++a) jxi.push_back(Jet::variable(set, a, xi[a]));
  for (int a = 0; a < n; ++a) jx.push_back(Jet::variable(set, n + a, x[a]));
  Jet r = jet(jx, jxi);
  std::vector<int> gamma(alpha.begin(), alpha.end());
  gamma.insert(gamma.end(), beta.begin(), beta.end());
  return r.derivative(gamma);
}

SymbolDescriptor make_symbol(std::string name, Split split, SymbolOrder order, double rho, double delta,
                             ScalarEval eval, JetEval jet, std::vector<SeparableTerm> terms,
                             bool x_independent) {
  if (split.n1 < 1 || split.n2 < 1) throw std::invalid_argument("symbol: n1, n2 must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("symbol: rho must lie in [0,1]");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("symbol: delta must lie in [0,1)");
  if (!eval) throw std::invalid_argument("symbol: missing evaluator");
  SymbolDescriptor s;
  s.name = std::move(name);
  s.split = split;
  s.order = order;
  s.rho = rho;
  s.delta = delta;
  s.eval = std::move(eval);
  s.jet = std::move(jet);
  s.terms = std::move(terms);
  s.x_independent = x_independent;
  return s;
}

SymbolDescriptor make_multiplier(std::string name, Split split, SymbolOrder order, double rho, XiFunction b,
                                 JetEval jet) {
  ScalarEval eval = [b](std::span<const double>, std::span<const double> xi) { return b(xi); };
  SeparableTerm t{[](std::span<const double>) { return cplx(1.0); }, b, true};
  return make_symbol(std::move(name), split, order, rho, 0.0, eval, std::move(jet), {t}, true);
}

SymbolDescriptor make_separable(std::string name, Split split, SymbolOrder order, double rho, double delta,
                                std::vector<SeparableTerm> terms, JetEval jet) {
  if (terms.empty()) throw std::invalid_argument("make_separable: no terms");
  ScalarEval eval = [terms](std::span<const double> x, std::span<const double> xi) {
    cplx acc = 0.0;
    for (const auto& t : terms) acc += t.a(x) * t.b(xi);
    return acc;
  };
  bool xind = std::all_of(terms.begin(), terms.end(), [](const SeparableTerm& t) { return t.a_is_one; });
  return make_symbol(std::move(name), split, order, rho, delta, eval, std::move(jet), std::move(terms), xind);
}

SymbolDescriptor scaled_by(const SymbolDescriptor& s, cplx c) {
  SymbolDescriptor r = s;
  auto ev = s.eval;
  r.eval = [ev, c](std::span<const double> x, std::span<const double> xi) { return c * ev(x, xi); };
  if (s.jet) {
    auto jt = s.jet;
    r.jet = [jt, c](std::span<const Jet> x, std::span<const Jet> xi) { return jt(x, xi) * Jet(c); };
  }
  for (auto& t : r.terms) {
    auto b = t.b;
    t.b = [b, c](std::span<const double> xi) { return c * b(xi); };
  }
  return r;
}

SymbolDescriptor bessel_modulate(const SymbolDescriptor& s, double alpha) {
  if (s.order.biparameter)
    throw std::invalid_argument("bessel_modulate: needs a product-class (scalar order) symbol");
  SymbolDescriptor r = s;
  r.name = s.name + "*bessel";
  r.order.m = s.order.m + 2.0 * alpha;
  auto weight = [alpha](std::span<const double> xi) {
    double q = 1.0;
    for (double v : xi) q += v * v;
    return std::pow(q, alpha);
  };
  auto ev = s.eval;
  r.eval = [ev, weight](std::span<const double> x, std::span<const double> xi) { return ev(x, xi) * weight(xi); };
  if (s.jet) {
    auto jt = s.jet;
    r.jet = [jt, alpha](std::span<const Jet> x, std::span<const Jet> xi) {
      Jet q(1.0);
      for (const auto& v : xi) q = q + v * v;
      return jt(x, xi) * pow(q, alpha);
    };
  }
  for (auto& t : r.terms) {
    auto b = t.b;
    t.b = [b, weight](std::span<const double> xi) { return b(xi) * weight(xi); };
  }
  return r;
}

void ProbeSpec::add(std::vector<double> xv, std::vector<double> xiv) {
  if (xv.size() != xiv.size()) throw std::invalid_argument("ProbeSpec: x and xi dimensions differ");
  x.push_back(std::move(xv));
  xi.push_back(std::move(xiv));
}

ProbeSpec ProbeSpec::sample(Split split, double xi_cap, int count, std::uint64_t seed, double L) {
  int n = split.n();
  ProbeSpec p;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rand_x = [&] {
    std::vector<double> v(n);
    for (auto& c : v) c = unit(rng) * L;
    return v;
  };
  p.add(rand_x(), std::vector<double>(n, 0.0));
  // Each factor alone, at a few dyadic radii (the other factor at 0).
  for (int f = 0; f < 2; ++f) {
    for (double r = 1.0; r <= xi_cap; r *= 4.0) {
      std::vector<double> v(n, 0.0);
      v[f == 0 ? 0 : split.n1] = r;
      p.add(rand_x(), v);
    }
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  double lmax = std::log(std::max(xi_cap, 1.0));
  for (int i = 0; i < count; ++i) {
    std::vector<double> dir(n);
    double nn = 0.0;
    for (auto& c : dir) {
      c = gauss(rng);
      nn += c * c;
    }
    nn = std::sqrt(nn);
    double r = std::exp(std::log(0.25) + unit(rng) * (lmax - std::log(0.25)));
    for (auto& c : dir) c = c / nn * r;
    p.add(rand_x(), dir);
  }
  return p;
}

int admissible_order(int n) { return n / 2 + 1; }

const std::vector<std::vector<int>>& derivative_indices(int n, int k, int N_x) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::vector<std::vector<int>>> cache;
  auto set = derivative_set(n, k, N_x);
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple(n, k, N_x);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> idx;
  for (std::size_t i = 0; i < set->size(); ++i) idx.push_back(set->exponent(i));
  return cache.emplace(key, std::move(idx)).first->second;
}

std::vector<cplx> derivative_table(const SymbolDescriptor& s, std::span<const double> x,
                                   std::span<const double> xi, int k, int N_x, bool use_oracle, double h0) {
  int n = s.split.n();
  if (static_cast<int>(x.size()) != n || static_cast<int>(xi.size()) != n)
    throw std::invalid_argument("derivative_table: point dimension does not match the symbol");
  const auto& idx = derivative_indices(n, k, N_x);
  std::vector<cplx> out(idx.size());
  if (use_oracle && s.jet) {
    auto set = derivative_set(n, k, N_x);
    std::vector<Jet> jx, jxi;
    for (int a = 0; a < n; ++a) jxi.push_back(Jet::variable(set, a, xi[a]));
    for (int a = 0; a < n; ++a) jx.push_back(Jet::variable(set, n + a, x[a]));
    Jet r = s.jet(jx, jxi);
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = r.derivative(idx[i]);
    return out;
  }
  auto scales = axis_scales(s, xi);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& g = idx[i];
    int order = 0;
    for (int v : g) order += v;
    if (order == 0) {
      out[i] = s.eval(x, xi);
      continue;
    }
    // Larger base steps at higher order keep roundoff (∝ eps/h^order) in check.
    double h = std::max(h0, std::pow(2.0, -52.0 / (order + 4)));
    std::vector<double> step(2 * n), half(2 * n);
    for (int v = 0; v < 2 * n; ++v) {
      step[v] = h * scales[v];
      half[v] = 0.5 * step[v];
    }
    cplx d1 = central_difference(s, x, xi, g, step);
    cplx d2 = central_difference(s, x, xi, g, half);
    out[i] = (4.0 * d2 - d1) / 3.0;
  }
  return out;
}

namespace {

struct Weights {
  ClassKind kind;
  double m, m1, m2, rho, delta;
};

double class_weight(const Weights& w, Split split, std::span<const double> xi, const std::vector<int>& g) {
  int n = split.n();
  double r1 = factor_norm(xi, 0, split.n1), r2 = factor_norm(xi, split.n1, n);
  int a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  for (int a = 0; a < n; ++a) {
    (a < split.n1 ? a1 : a2) += g[a];
    (a < split.n1 ? b1 : b2) += g[n + a];
  }
  double e1 = w.rho * a1 - w.delta * b1, e2 = w.rho * a2 - w.delta * b2;
  if (w.kind == ClassKind::product)
    return std::pow(1.0 + std::hypot(r1, r2), -w.m) * std::pow(1.0 + r1, e1) * std::pow(1.0 + r2, e2);
  return std::pow(1.0 + r1, e1 - w.m1) * std::pow(1.0 + r2, e2 - w.m2);
}

struct SupResult {
  double sup = 0.0;
  Witness worst;
};

SupResult weighted_sup(const SymbolDescriptor& s, const Weights& w, const ProbeSpec& probe, int k, int N_x) {
  int n = s.split.n();
  const auto& idx = derivative_indices(n, k, N_x);
  SupResult res;
  bool have = false;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    const auto& x = probe.x[p];
    const auto& xi = probe.xi[p];
    auto table = derivative_table(s, x, xi, k, N_x, true, probe.h0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      double v = std::abs(table[i]) * class_weight(w, s.split, xi, idx[i]);
      if (!std::isfinite(v))
        throw std::runtime_error("non-finite derivative estimate at " + describe_point(x, xi));
      if (!have || v > res.sup) {
        have = true;
        res.sup = v;
        res.worst.alpha.assign(idx[i].begin(), idx[i].begin() + n);
        res.worst.beta.assign(idx[i].begin() + n, idx[i].end());
        res.worst.x = x;
        res.worst.xi = xi;
      }
    }
  }
  return res;
}

}  // namespace

SymbolNormReport seminorm(const SymbolDescriptor& s, const ProbeSpec& probe) {
  int n = s.split.n();
  SymbolNormReport rep;
  rep.k = admissible_order(n);
  rep.N_x = admissible_order(n);
  Weights w{s.order.biparameter ? ClassKind::biparameter : ClassKind::product, s.order.m, s.order.m1,
            s.order.m2, s.rho, s.delta};
  auto sup = weighted_sup(s, w, probe, rep.k, rep.N_x);
  rep.seminorm = sup.sup;
  rep.worst = std::move(sup.worst);
  rep.used_oracle = s.has_oracle();
  rep.class_ok = std::isfinite(rep.seminorm) && rep.seminorm <= probe.cap;
  return rep;
}

ClassCheckResult class_check(const SymbolDescriptor& s, const ClassSpec& spec, const ProbeSpec& probe) {
  Weights w{spec.kind, 0.0, 0.0, 0.0, spec.rho.value_or(s.rho), spec.delta.value_or(s.delta)};
  if (spec.kind == ClassKind::product) {
    if (spec.m) {
      w.m = *spec.m;
    } else if (!s.order.biparameter) {
      w.m = s.order.m;
    } else {
      throw std::invalid_argument("class_check: product check of a bi-parameter symbol needs an explicit m");
    }
  } else {
    if (spec.m12) {
      w.m1 = spec.m12->first;
      w.m2 = spec.m12->second;
    } else if (s.order.biparameter) {
      w.m1 = s.order.m1;
      w.m2 = s.order.m2;
    } else {
      throw std::invalid_argument("class_check: bi-parameter check of a product symbol needs explicit (m1,m2)");
    }
  }
  int n = s.split.n();
  int k = spec.k.value_or(admissible_order(n));
  int N_x = spec.N_x.value_or(admissible_order(n));
  auto sup = weighted_sup(s, w, probe, k, N_x);
  ClassCheckResult r;
  r.margin = sup.sup;
  r.worst = std::move(sup.worst);
  r.ok = std::isfinite(r.margin) && r.margin <= probe.cap;
  return r;
}

double oracle_fd_discrepancy(const SymbolDescriptor& s, const ProbeSpec& probe, int k, int N_x) {
  if (!s.jet) throw std::logic_error("oracle_fd_discrepancy: symbol has no oracle");
  int n = s.split.n();
  const auto& idx = derivative_indices(n, k, N_x);
  std::vector<double> bigs(probe.size()), errs(probe.size());
  double global = 0.0;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    const auto& x = probe.x[p];
    const auto& xi = probe.xi[p];
    auto exact = derivative_table(s, x, xi, k, N_x, true, probe.h0);
    auto fd = derivative_table(s, x, xi, k, N_x, false, probe.h0);
    auto scales = axis_scales(s, xi);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      double unit = 1.0;
      for (int v = 0; v < 2 * n; ++v) unit *= std::pow(scales[v], idx[i][v]);
      bigs[p] = std::max(bigs[p], std::abs(exact[i]) * unit);
      errs[p] = std::max(errs[p], std::abs(fd[i] - exact[i]) * unit);
    }
    global = std::max(global, bigs[p]);
  }
  // Where the symbol all but vanishes (e.g. the edge of a cutoff) both tables
  // are roundoff; measure those probes against a floor tied to the largest one.
  double worst = 0.0;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    double ref = std::max(bigs[p], 1e-8 * global);
    if (ref > 0.0) worst = std::max(worst, errs[p] / ref);
  }
  return worst;
}

}  // namespace bipdo
