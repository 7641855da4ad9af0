#include "bipdo/operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bipdo/parallel.hpp"

namespace bipdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::vector<double>> all_points(const GridSpec& g) {
  std::vector<std::vector<double>> pts(g.size(), std::vector<double>(g.n()));
  for (std::size_t p = 0; p < g.size(); ++p) g.point(p, pts[p].data());
  return pts;
}

std::vector<std::vector<double>> all_frequencies(const GridSpec& g) {
  std::vector<std::vector<double>> fr(g.size(), std::vector<double>(g.n()));
  for (std::size_t p = 0; p < g.size(); ++p) g.frequency(p, fr[p].data());
  return fr;
}

}  // namespace

struct QuantizedOperator::Cache {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> xi;
  std::vector<std::vector<int>> xidx;  // grid index per axis
  std::vector<std::vector<int>> kint;  // integer frequency per axis
  std::vector<cplx> roots;             // e^{2πi t/N}
  std::vector<cplx> table;             // σ(x_p, ξ_q), row-major in p, when materialized
  std::vector<std::vector<cplx>> a;    // separable factors on the grid
  std::vector<std::vector<cplx>> b;
  std::vector<bool> a_one;
};

QuantizedOperator::QuantizedOperator(SymbolDescriptor symbol, GridSpec grid)
    : QuantizedOperator(symbol, grid, symbol.separable() ? Path::separable : Path::dense) {}

QuantizedOperator::QuantizedOperator(SymbolDescriptor symbol, GridSpec grid, Path path)
    : symbol_(std::move(symbol)), grid_(grid), path_(path) {
  if (symbol_.split.n() != grid_.n()) throw std::invalid_argument("QuantizedOperator: symbol and grid dimensions differ");
  if (path_ == Path::separable && !symbol_.separable())
    throw std::invalid_argument("QuantizedOperator: separable path needs a separable symbol");
  build_cache();
}

void QuantizedOperator::build_cache() {
  auto c = std::make_shared<Cache>();
  const GridSpec& g = grid_;
  c->x = all_points(g);
  c->xi = all_frequencies(g);
  c->xidx.assign(g.size(), std::vector<int>(g.n()));
  c->kint.assign(g.size(), std::vector<int>(g.n()));
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.unflatten(p, c->xidx[p].data());
    for (int a = 0; a < g.n(); ++a) c->kint[p][a] = g.freq_of_index(c->xidx[p][a]);
  }
  c->roots.resize(g.N);
  for (int t = 0; t < g.N; ++t) c->roots[t] = std::polar(1.0, kTwoPi * t / g.N);

  if (path_ == Path::separable) {
    for (const auto& term : symbol_.terms) {
      std::vector<cplx> av(g.size()), bv(g.size());
      for (std::size_t p = 0; p < g.size(); ++p) {
        av[p] = term.a_is_one ? cplx(1.0) : term.a(c->x[p]);
        bv[p] = term.b(c->xi[p]);
      }
      c->a.push_back(std::move(av));
      c->b.push_back(std::move(bv));
      c->a_one.push_back(term.a_is_one);
    }
  } else if (g.size() <= kDenseTableMaxUnknowns) {
    std::size_t S = g.size();
    c->table.resize(S * S);
    parallel_for(S, [&](std::size_t p) {
      for (std::size_t q = 0; q < S; ++q) c->table[p * S + q] = symbol_.eval(c->x[p], c->xi[q]);
    });
  }
  cache_ = c;
}

SampledField QuantizedOperator::apply(const SampledField& f) const {
  require_same_grid(f.grid, grid_);
  const GridSpec& g = grid_;
  const Cache& c = *cache_;
  SampledField fhat = dft_forward(f);
  SampledField out(g);
  if (path_ == Path::separable) {
    SampledField tmp(g);
    for (std::size_t t = 0; t < c.a.size(); ++t) {
      for (std::size_t q = 0; q < g.size(); ++q) tmp[q] = c.b[t][q] * fhat[q];
      tmp = dft_inverse(tmp);
      if (c.a_one[t]) {
        for (std::size_t p = 0; p < g.size(); ++p) out[p] += tmp[p];
      } else {
        for (std::size_t p = 0; p < g.size(); ++p) out[p] += c.a[t][p] * tmp[p];
      }
    }
    return out;
  }
  const double norm = 1.0 / std::pow(g.L, g.n());
  const std::size_t S = g.size();
  const int n = g.n(), N = g.N;
  parallel_for(S, [&](std::size_t p) {
    cplx acc = 0.0;
    const auto& xi_p = c.xidx[p];
    for (std::size_t q = 0; q < S; ++q) {
      if (fhat[q] == cplx(0.0)) continue;
      long t = 0;
      for (int a = 0; a < n; ++a) t += static_cast<long>(xi_p[a]) * c.kint[q][a];
      t = ((t % N) + N) % N;
      cplx sig = c.table.empty() ? symbol_.eval(c.x[p], c.xi[q]) : c.table[p * S + q];
      acc += fhat[q] * sig * c.roots[t];
    }
    out[p] = acc * norm;
  });
  return out;
}

SampledField QuantizedOperator::adjoint_apply(const SampledField& gfield) const {
  require_same_grid(gfield.grid, grid_);
  const GridSpec& g = grid_;
  const Cache& c = *cache_;
  SampledField out(g);
  if (path_ == Path::separable) {
    SampledField tmp(g);
    for (std::size_t t = 0; t < c.a.size(); ++t) {
      if (c.a_one[t]) {
        tmp = gfield;
      } else {
        for (std::size_t p = 0; p < g.size(); ++p) tmp[p] = std::conj(c.a[t][p]) * gfield[p];
      }
      tmp = dft_forward(tmp);
      for (std::size_t q = 0; q < g.size(); ++q) tmp[q] *= std::conj(c.b[t][q]);
      tmp = dft_inverse(tmp);
      for (std::size_t p = 0; p < g.size(); ++p) out[p] += tmp[p];
    }
    return out;
  }
  // h(ξ) = Σ_x conj σ(x,ξ) e^{−2πi x·ξ} g(x) (L/N)^n, then T*g = inverse DFT of h.
  const double w = g.cell_volume();
  const std::size_t S = g.size();
  const int n = g.n(), N = g.N;
  SampledField h(g);
  parallel_for(S, [&](std::size_t q) {
    cplx acc = 0.0;
    for (std::size_t p = 0; p < S; ++p) {
      if (gfield[p] == cplx(0.0)) continue;
      long t = 0;
      for (int a = 0; a < n; ++a) t += static_cast<long>(c.xidx[p][a]) * c.kint[q][a];
      t = ((t % N) + N) % N;
      cplx sig = c.table.empty() ? symbol_.eval(c.x[p], c.xi[q]) : c.table[p * S + q];
      acc += std::conj(sig) * std::conj(c.roots[t]) * gfield[p];
    }
    h[q] = acc * w;
  });
  return dft_inverse(h);
}

cplx QuantizedOperator::apply_at(const SampledField& f, std::span<const double> x) const {
  require_same_grid(f.grid, grid_);
  return quantized_sum_at(symbol_, LatticeCoefficients::from_field(f), x);
}

std::vector<cplx> QuantizedOperator::dense_matrix() const {
  const std::size_t S = grid_.size();
  std::vector<cplx> M(S * S);
  SampledField e(grid_);
  for (std::size_t col = 0; col < S; ++col) {
    std::fill(e.values.begin(), e.values.end(), cplx(0.0));
    e[col] = 1.0;
    SampledField y = apply(e);
    for (std::size_t row = 0; row < S; ++row) M[row * S + col] = y[row];
  }
  return M;
}

SampledField apply(const QuantizedOperator& T, const SampledField& f) { return T.apply(f); }
SampledField adjoint_apply(const QuantizedOperator& T, const SampledField& g) { return T.adjoint_apply(g); }
cplx apply_at(const QuantizedOperator& T, const SampledField& f, std::span<const double> x) {
  return T.apply_at(f, x);
}

SampledField kernel_slice(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x) {
  if (s.split.n() != grid.n()) throw std::invalid_argument("kernel_slice: dimension mismatch");
  SampledField k(grid);
  std::vector<double> xi(grid.n());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    grid.frequency(q, xi.data());
    k[q] = s.eval(x, xi);
  }
  fft_inplace(grid, k.values.data(), -1);
  double norm = 1.0 / std::pow(grid.L, grid.n());
  for (auto& v : k.values) v *= norm;
  return k;
}

double kernel_l1(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x) {
  SampledField k = kernel_slice(s, grid, x);
  double acc = 0.0;
  for (const auto& v : k.values) acc += std::abs(v);
  return acc * grid.cell_volume();
}

KernelSplit kernel_l1_split(const SymbolDescriptor& s, const GridSpec& grid, std::span<const double> x, double b) {
  SampledField k = kernel_slice(s, grid, x);
  KernelSplit out;
  std::vector<int> idx(grid.n());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.unflatten(p, idx.data());
    double d2 = 0.0;
    for (int a = 0; a < grid.n(); ++a) {
      double d = std::min(idx[a], grid.N - idx[a]) * grid.dx();
      d2 += d * d;
    }
    (std::sqrt(d2) <= b ? out.inner : out.outer) += std::abs(k[p]);
  }
  out.inner *= grid.cell_volume();
  out.outer *= grid.cell_volume();
  return out;
}

LatticeCoefficients LatticeCoefficients::from_field(const SampledField& f) {
  LatticeCoefficients c;
  c.periods.assign(f.grid.n(), f.grid.L);
  c.N = f.grid.N;
  c.values = dft_forward(f).values;
  return c;
}

double LatticeCoefficients::l2_norm() const {
  double vol = 1.0;
  for (double P : periods) vol *= P;
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s / vol);
}

std::vector<double> ScalingOp::axis_factors() const {
  if (exponents.size() != 2) throw std::invalid_argument("ScalingOp: needs one exponent per factor");
  std::vector<double> s;
  for (int a = 0; a < split.n(); ++a) s.push_back(std::exp2(exponents[a < split.n1 ? 0 : 1]));
  return s;
}

ScalingOp scaling_for(const std::vector<int>& j, double rho, Split split, ScaleDirection dir) {
  if (j.size() != 2) throw std::invalid_argument("scaling_for: j must be a pair");
  return ScalingOp{{j[0] * rho, j[1] * rho}, dir, split};
}

LatticeCoefficients scaling_apply(const ScalingOp& op, const LatticeCoefficients& c) {
  auto s = op.axis_factors();
  if (static_cast<int>(s.size()) != c.dims()) throw std::invalid_argument("scaling_apply: dimension mismatch");
  LatticeCoefficients out = c;
  double gain = 1.0;
  for (int a = 0; a < c.dims(); ++a) {
    if (op.direction == ScaleDirection::forward) {
      out.periods[a] = c.periods[a] / s[a];
      gain /= s[a];
    } else {
      out.periods[a] = c.periods[a] * s[a];
      gain *= s[a];
    }
  }
  for (auto& v : out.values) v *= gain;
  return out;
}

SymbolDescriptor scaled_symbol(const SymbolDescriptor& sym, const ScalingOp& op) {
  auto s = op.axis_factors();
  if (static_cast<int>(s.size()) != sym.split.n()) throw std::invalid_argument("scaled_symbol: dimension mismatch");
  SymbolDescriptor r = sym;
  r.name = sym.name + ".scaled";
  auto ev = sym.eval;
  r.eval = [ev, s](std::span<const double> x, std::span<const double> xi) {
    std::vector<double> xs(x.size()), xis(xi.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
      xs[a] = x[a] / s[a];
      xis[a] = xi[a] * s[a];
    }
    return ev(xs, xis);
  };
  if (sym.jet) {
    auto jt = sym.jet;
    r.jet = [jt, s](std::span<const Jet> x, std::span<const Jet> xi) {
      std::vector<Jet> xs(x.begin(), x.end()), xis(xi.begin(), xi.end());
      for (std::size_t a = 0; a < xs.size(); ++a) {
        xs[a] = xs[a] * Jet(1.0 / s[a]);
        xis[a] = xis[a] * Jet(s[a]);
      }
      return jt(xs, xis);
    };
  }
  for (auto& t : r.terms) {
    auto a = t.a;
    auto b = t.b;
    t.a = [a, s](std::span<const double> x) {
      std::vector<double> xs(x.size());
      for (std::size_t q = 0; q < x.size(); ++q) xs[q] = x[q] / s[q];
      return a(xs);
    };
    t.b = [b, s](std::span<const double> xi) {
      std::vector<double> z(xi.size());
      for (std::size_t q = 0; q < xi.size(); ++q) z[q] = xi[q] * s[q];
      return b(z);
    };
  }
  return r;
}

cplx quantized_sum_at(const SymbolDescriptor& s, const LatticeCoefficients& c, std::span<const double> x) {
  int d = c.dims();
  if (static_cast<int>(x.size()) != d || s.split.n() != d) throw std::invalid_argument("quantized_sum_at: dimension mismatch");
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(c.N);
  if (c.values.size() != total) throw std::invalid_argument("quantized_sum_at: coefficient count mismatch");
  double vol = 1.0;
  for (double P : c.periods) vol *= P;
  std::vector<double> xi(d);
  cplx acc = 0.0;
  for (std::size_t q = 0; q < total; ++q) {
    if (c.values[q] == cplx(0.0)) continue;
    std::size_t rem = q;
    double ph = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      int i = static_cast<int>(rem % c.N);
      rem /= c.N;
      int k = i < c.N / 2 ? i : i - c.N;
      xi[a] = k / c.periods[a];
      ph += xi[a] * x[a];
    }
    acc += c.values[q] * s.eval(x, xi) * std::polar(1.0, kTwoPi * ph);
  }
  return acc / vol;
}

SampledField bessel_apply(double alpha, const SampledField& f) {
  SampledField h = dft_forward(f);
  std::vector<double> xi(f.grid.n());
  for (std::size_t q = 0; q < h.size(); ++q) {
    f.grid.frequency(q, xi.data());
    double s = 1.0;
    for (double v : xi) s += v * v;
    h[q] *= std::pow(s, -alpha);
  }
  return dft_inverse(h);
}

LinearOperator as_linear(const QuantizedOperator& T) {
  auto op = std::make_shared<QuantizedOperator>(T);
  return {T.grid(), [op](const SampledField& f) { return op->apply(f); },
          [op](const SampledField& g) { return op->adjoint_apply(g); }};
}

LinearOperator adjoint_of(const LinearOperator& A) { return {A.grid, A.adjoint, A.apply}; }

LinearOperator compose(const LinearOperator& A, const LinearOperator& B) {
  require_same_grid(A.grid, B.grid);
  auto a = A, b = B;
  return {A.grid, [a, b](const SampledField& f) { return a.apply(b.apply(f)); },
          [a, b](const SampledField& g) { return b.adjoint(a.adjoint(g)); }};
}

}  // namespace bipdo
