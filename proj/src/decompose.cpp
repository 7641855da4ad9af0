#include "bipdo/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bipdo {

double varphi(double t) { return varphi_t<double>(t); }

double phi_j(std::span<const double> xi, int j) {
  if (j < 0) throw std::invalid_argument("phi_j: j must be >= 0");
  return phi_j_t<double>(xi.data(), static_cast<int>(xi.size()), j);
}

int default_ell_max(int N) {
  int e = 0;
  while ((1 << (e + 1)) <= N) ++e;
  return std::max(e, 1);
}

double delta_ell(std::span<const double> xi1, std::span<const double> xi2, int ell, int ell_max) {
  std::vector<double> xi(xi1.begin(), xi1.end());
  xi.insert(xi.end(), xi2.begin(), xi2.end());
  Split sp{static_cast<int>(xi1.size()), static_cast<int>(xi2.size())};
  return delta_ell_t<double>(std::span<const double>(xi), sp, ell, ell_max);
}

namespace {

double phi0_half(std::span<const double> y) {
  double v = 1.0;
  for (double c : y) v *= varphi(2.0 * c);
  return v;
}

}  // namespace

double cube_partition(std::span<const double> x, std::span<const int> k) {
  int d = static_cast<int>(x.size());
  if (static_cast<int>(k.size()) != d) throw std::invalid_argument("cube_partition: dimension mismatch");
  std::vector<double> y(d);
  for (int a = 0; a < d; ++a) y[a] = x[a] - k[a];
  double num = phi0_half(y);
  if (num == 0.0) return 0.0;
  // Every l with φ_0(x − l) ≠ 0 has l_a ∈ {⌊x_a⌋ − 1, ⌊x_a⌋, ⌊x_a⌋ + 1, ⌊x_a⌋ + 2}.
  std::vector<int> base(d), off(d, 0);
  for (int a = 0; a < d; ++a) base[a] = static_cast<int>(std::floor(x[a])) - 1;
  double den = 0.0;
  while (true) {
    for (int a = 0; a < d; ++a) y[a] = x[a] - (base[a] + off[a]);
    den += phi0_half(y);
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++off[a] < 4) break;
      off[a] = 0;
    }
    if (a < 0) break;
  }
  return num / den;
}

const char* to_string(DerivedKind k) {
  switch (k) {
    case DerivedKind::annulus_j: return "annulus_j";
    case DerivedKind::cone_lj: return "cone_lj";
    case DerivedKind::flat_j: return "flat_j";
    case DerivedKind::sharp_j: return "sharp_j";
    case DerivedKind::low_r: return "low_r";
    case DerivedKind::high_r: return "high_r";
    case DerivedKind::theta: return "theta";
  }
  return "?";
}

DerivedKind derived_kind_from_string(const std::string& s) {
  for (auto k : {DerivedKind::annulus_j, DerivedKind::cone_lj, DerivedKind::flat_j, DerivedKind::sharp_j,
                 DerivedKind::low_r, DerivedKind::high_r, DerivedKind::theta})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown derived symbol kind '" + s + "'");
}

cplx Mollifier::operator()(std::span<const double> x) const {
  cplx acc = 0.0;
  for (const auto& mode : spectrum) {
    double ph = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) ph += mode.k[a] * x[a];
    acc += mode.coef * std::polar(1.0, 2.0 * std::numbers::pi * ph / grid.L);
  }
  return acc / std::pow(grid.L, grid.n());
}

Mollifier mollifier_lambda(const GridSpec& grid, const DyadicCube& Q, double rho) {
  int n = grid.n();
  if (static_cast<int>(Q.anchor.size()) != n) throw std::invalid_argument("mollifier: cube dimension mismatch");
  if (Q.side < 1 || Q.side > grid.N) throw std::invalid_argument("mollifier: bad cube side");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("mollifier: rho must lie in [0,1]");
  Mollifier mol;
  mol.grid = grid;
  mol.cube = Q;
  mol.rho = rho;
  mol.r = Q.side * grid.dx();
  double nu = std::pow(mol.r, -rho);
  mol.M = static_cast<int>(std::floor(nu * grid.L / (2.0 * std::sqrt(static_cast<double>(n))) + 1e-12));
  if (4 * mol.M >= grid.N) throw MollifierInfeasible("mollifier: spectrum does not fit the grid; use a finer grid");

  std::vector<double> center(n);
  for (int a = 0; a < n; ++a) center[a] = (Q.anchor[a] + 0.5 * (Q.side - 1)) * grid.dx();
  // F on one axis as a function of the grid index.
  std::vector<std::vector<double>> fejer(n, std::vector<double>(grid.N));
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < grid.N; ++i) {
      double t = 2.0 * std::numbers::pi * (i * grid.dx() - center[a]) / grid.L;
      double v = 1.0;
      for (int k = 1; k <= mol.M; ++k) v += 2.0 * (1.0 - k / (mol.M + 1.0)) * std::cos(k * t);
      fejer[a][i] = v;
    }
  }
  SampledField f2(grid);
  std::vector<int> idx(n);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.unflatten(p, idx.data());
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= fejer[a][idx[a]];
    f2[p] = v * v;
  }
  double qmin = std::numeric_limits<double>::infinity();
  {
    std::vector<int> off(n, 0);
    while (true) {
      for (int a = 0; a < n; ++a) idx[a] = ((Q.anchor[a] + off[a]) % grid.N + grid.N) % grid.N;
      qmin = std::min(qmin, f2[grid.flatten(idx.data())].real());
      int a = n - 1;
      for (; a >= 0; --a) {
        if (++off[a] < Q.side) break;
        off[a] = 0;
      }
      if (a < 0) break;
    }
  }
  if (!(qmin > 0.0)) throw MollifierInfeasible("mollifier: kernel vanishes on the cube; use a larger cube or smaller rho");
  mol.scale = 1.0 / qmin;
  double vmax = 0.0;
  for (auto& v : f2.values) {
    v *= mol.scale;
    vmax = std::max(vmax, v.real());
  }
  if (vmax > 10.0) {
    std::ostringstream os;
    os << "mollifier: max lambda = " << vmax << " exceeds 10; use a larger cube or a smaller rho";
    throw MollifierInfeasible(os.str());
  }
  mol.values = f2;
  SampledField hat = dft_forward(f2);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.unflatten(p, idx.data());
    bool inside = true;
    FourierMode mode;
    for (int a = 0; a < n; ++a) {
      int k = grid.freq_of_index(idx[a]);
      inside = inside && std::abs(k) <= 2 * mol.M;
      mode.k.push_back(k);
    }
    if (!inside) continue;
    mode.coef = hat[p];
    mol.spectrum.push_back(std::move(mode));
  }
  return mol;
}

namespace {

using XiCut = std::function<double(std::span<const double>)>;
using XiCutJet = std::function<Jet(std::span<const Jet>)>;

SymbolDescriptor with_cutoff(const SymbolDescriptor& s, std::string name, XiCut cut, XiCutJet cut_jet) {
  SymbolDescriptor r = s;
  r.name = std::move(name);
  auto ev = s.eval;
  r.eval = [ev, cut](std::span<const double> x, std::span<const double> xi) {
    double c = cut(xi);
    return c == 0.0 ? cplx(0.0) : ev(x, xi) * c;
  };
  if (s.jet) {
    auto jt = s.jet;
    r.jet = [jt, cut_jet](std::span<const Jet> x, std::span<const Jet> xi) { return jt(x, xi) * cut_jet(xi); };
  }
  for (auto& t : r.terms) {
    auto b = t.b;
    t.b = [b, cut](std::span<const double> xi) {
      double c = cut(xi);
      return c == 0.0 ? cplx(0.0) : b(xi) * c;
    };
  }
  return r;
}

template <class S>
S annulus_cut(std::span<const S> xi, Split split, const std::vector<int>& j) {
  if (j.size() == 1) return phi_j_t<S>(xi.data(), split.n(), j[0]);
  return phi_j_t<S>(xi.data(), split.n1, j[0]) * phi_j_t<S>(xi.data() + split.n1, split.n2, j[1]);
}

template <class S>
S cone_sum(std::span<const S> xi, Split split, int lo, int hi, int ell_max) {
  S acc = S(0.0);
  for (int l = lo; l <= hi; ++l) acc = acc + delta_ell_t<S>(xi, split, l, ell_max);
  return acc;
}

}  // namespace

SymbolDescriptor derived_symbol(const SymbolDescriptor& s, DerivedKind kind, const DecompositionIndex& idx,
                                const Mollifier* lambda) {
  const Split split = s.split;
  const std::string tag = s.name + "." + to_string(kind);
  const double r = idx.r;
  if (!(r > 0.0)) throw std::invalid_argument("derived_symbol: r must be positive");
  auto need_j = [&](std::size_t allowed) {
    if (idx.j.empty() || idx.j.size() > allowed)
      throw std::invalid_argument(std::string("derived_symbol: ") + to_string(kind) + " needs a j index");
    for (int v : idx.j)
      if (v < 0) throw std::invalid_argument("derived_symbol: j must be >= 0");
  };
  auto need_ell_max = [&] {
    if (idx.ell_max < 1) throw std::invalid_argument(std::string("derived_symbol: ") + to_string(kind) + " needs ell_max >= 1");
  };

  switch (kind) {
    case DerivedKind::annulus_j: {
      need_j(2);
      if (idx.j.size() == 2 && (split.n1 < 1 || split.n2 < 1)) throw std::invalid_argument("bad split");
      auto j = idx.j;
      return with_cutoff(
          s, tag, [split, j](std::span<const double> xi) { return annulus_cut<double>(xi, split, j); },
          [split, j](std::span<const Jet> xi) { return annulus_cut<Jet>(xi, split, j); });
    }
    case DerivedKind::cone_lj:
    case DerivedKind::flat_j:
    case DerivedKind::sharp_j: {
      need_j(1);
      need_ell_max();
      int j = idx.j[0], L = idx.ell_max;
      int lo, hi;
      if (kind == DerivedKind::cone_lj) {
        if (idx.ell < -L || idx.ell > L) throw std::invalid_argument("derived_symbol: |ell| > ell_max");
        lo = hi = idx.ell;
      } else if (kind == DerivedKind::flat_j) {
        lo = j + 1;
        hi = L;
      } else {
        lo = -L;
        hi = std::min(j, L);
      }
      auto cut = [split, j, r, lo, hi, L](std::span<const double> xi) {
        std::vector<double> rx(xi.begin(), xi.end());
        for (auto& v : rx) v *= r;
        double a = phi_j_t<double>(rx.data(), split.n(), j);
        if (a == 0.0 || lo > hi) return 0.0;
        return a * cone_sum<double>(xi, split, lo, hi, L);
      };
      auto cut_jet = [split, j, r, lo, hi, L](std::span<const Jet> xi) {
        if (lo > hi) return Jet(0.0);
        std::vector<Jet> rx(xi.begin(), xi.end());
        for (auto& v : rx) v = v * Jet(r);
        return phi_j_t<Jet>(rx.data(), split.n(), j) * cone_sum<Jet>(xi, split, lo, hi, L);
      };
      return with_cutoff(s, tag, cut, cut_jet);
    }
    case DerivedKind::low_r: {
      return with_cutoff(
          s, tag, [r](std::span<const double> xi) { return varphi_norm<double>(xi.data(), static_cast<int>(xi.size()), r); },
          [r](std::span<const Jet> xi) { return varphi_norm<Jet>(xi.data(), static_cast<int>(xi.size()), r); });
    }
    case DerivedKind::high_r: {
      SymbolDescriptor out = s;
      out.name = tag;
      auto ev = s.eval;
      out.eval = [ev, r](std::span<const double> x, std::span<const double> xi) {
        cplx v = ev(x, xi);
        double c = varphi_norm<double>(xi.data(), static_cast<int>(xi.size()), r);
        return v - v * c;
      };
      if (s.jet) {
        auto jt = s.jet;
        out.jet = [jt, r](std::span<const Jet> x, std::span<const Jet> xi) {
          Jet v = jt(x, xi);
          return v - v * varphi_norm<Jet>(xi.data(), static_cast<int>(xi.size()), r);
        };
      }
      out.terms.clear();
      for (const auto& t : s.terms) {
        out.terms.push_back(t);
        auto b = t.b;
        out.terms.push_back({t.a, [b, r](std::span<const double> xi) {
                               double c = varphi_norm<double>(xi.data(), static_cast<int>(xi.size()), r);
                               return c == 0.0 ? cplx(0.0) : -b(xi) * c;
                             },
                             t.a_is_one});
      }
      return out;
    }
    case DerivedKind::theta: {
      if (!lambda) throw std::invalid_argument("derived_symbol: theta needs a mollifier");
      if (lambda->grid.n() != split.n()) throw std::invalid_argument("derived_symbol: mollifier dimension mismatch");
      const double L = lambda->grid.L;
      const double norm = 1.0 / std::pow(L, split.n());
      struct Shift {
        std::vector<double> eta;  // k/L
        std::vector<int> k;
        cplx coef;                // λ̂(η)/L^n
      };
      auto shifts = std::make_shared<std::vector<Shift>>();
      for (const auto& m : lambda->spectrum) {
        Shift sh;
        sh.k = m.k;
        for (int k : m.k) sh.eta.push_back(k / L);
        sh.coef = m.coef * norm;
        shifts->push_back(std::move(sh));
      }
      auto mode = [L](const Shift& sh, std::span<const double> x) {
        double ph = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) ph += sh.k[a] * x[a];
        return sh.coef * std::polar(1.0, 2.0 * std::numbers::pi * ph / L);
      };
      SymbolDescriptor out = s;
      out.name = tag;
      auto ev = s.eval;
      out.eval = [ev, shifts, mode](std::span<const double> x, std::span<const double> xi) {
        cplx base = ev(x, xi);
        cplx acc = 0.0;
        std::vector<double> z(xi.size());
        for (const auto& sh : *shifts) {
          for (std::size_t a = 0; a < xi.size(); ++a) z[a] = xi[a] + sh.eta[a];
          acc += mode(sh, x) * (base - ev(x, z));
        }
        return acc;
      };
      if (s.jet) {
        auto jt = s.jet;
        out.jet = [jt, shifts, L](std::span<const Jet> x, std::span<const Jet> xi) {
          Jet base = jt(x, xi);
          Jet acc(0.0);
          std::vector<Jet> z(xi.begin(), xi.end());
          for (const auto& sh : *shifts) {
            for (std::size_t a = 0; a < xi.size(); ++a) z[a] = xi[a] + Jet(sh.eta[a]);
            Jet ph(0.0);
            for (std::size_t a = 0; a < x.size(); ++a) ph = ph + Jet(2.0 * std::numbers::pi * sh.k[a] / L) * x[a];
            acc = acc + Jet(sh.coef) * expi(ph) * (base - jt(x, z));
          }
          return acc;
        };
      }
      out.terms.clear();
      out.x_independent = false;
      for (const auto& t : s.terms) {
        auto a = t.a;
        const Mollifier mol = *lambda;
        out.terms.push_back({[a, mol](std::span<const double> x) { return a(x) * mol(x); }, t.b, false});
        for (const auto& sh : *shifts) {
          auto b = t.b;
          auto eta = sh.eta;
          out.terms.push_back({[a, sh, mode](std::span<const double> x) { return -a(x) * mode(sh, x); },
                               [b, eta](std::span<const double> xi) {
                                 std::vector<double> z(xi.begin(), xi.end());
                                 for (std::size_t q = 0; q < z.size(); ++q) z[q] += eta[q];
                                 return b(z);
                               },
                               false});
        }
      }
      return out;
    }
  }
  throw std::invalid_argument("derived_symbol: unknown kind");
}

}  // namespace bipdo
