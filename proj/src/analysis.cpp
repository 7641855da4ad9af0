#include "bipdo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bipdo/parallel.hpp"

namespace bipdo {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box–Muller on raw generator bits, so the start vector does not depend on
// the standard library's distribution implementations.
SampledField gaussian_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SampledField f(g);
  for (auto& v : f.values) {
    double u1 = 1.0 - unit(rng), u2 = unit(rng);
    double rad = std::sqrt(-2.0 * std::log(u1));
    v = cplx(rad * std::cos(2.0 * M_PI * u2), rad * std::sin(2.0 * M_PI * u2));
  }
  return f;
}

double sumsq(const SampledField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return s;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void finish_sweep(BoundednessReport& rep, const SweepCriteria& crit) {
  std::size_t n = rep.values.size();
  std::vector<double> lx;
  for (int N : rep.Ns) lx.push_back(std::log2(static_cast<double>(N)));
  rep.growth_fit = fit_log2(lx, rep.values);
  std::size_t lo = n >= 3 ? n - 3 : 0;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < n; ++i) {
    mx = std::max(mx, rep.values[i]);
    mn = std::min(mn, rep.values[i]);
  }
  rep.variation = mx > 0.0 ? (mx - mn) / mx : 0.0;
  rep.growth = (n >= 2 && rep.values.front() > 0.0) ? rep.values.back() / rep.values.front() - 1.0 : 0.0;
  bool uniform = rep.variation <= crit.max_variation;
  if (rep.expected_fail) {
    bool grows = rep.growth >= crit.min_expected_growth;
    rep.verdict = grows ? "EXPECTED-FAIL" : "UNEXPECTED-PASS";
    rep.pass = grows;
  } else {
    rep.verdict = uniform ? "PASS" : "FAIL";
    rep.pass = uniform;
  }
}

}  // namespace

OpNormResult l2_opnorm(const LinearOperator& A, const PowerOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("l2_opnorm: tol must be positive");
  OpNormResult res;
  SampledField v = gaussian_field(A.grid, opt.seed);
  double vv = sumsq(v);
  double best = 0.0, prev = -1.0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    SampledField w = A.apply(v);
    double ray = sumsq(w) / vv;
    best = std::max(best, ray);
    res.iterations = it;
    // Below this the operator is zero up to roundoff and the quotient is noise.
    if (ray <= 1e-28) {
      res.converged = true;
      break;
    }
    if (prev >= 0.0 && std::abs(ray - prev) <= opt.tol * ray) {
      res.converged = true;
      break;
    }
    prev = ray;
    SampledField u = A.adjoint(w);
    double uu = sumsq(u);
    if (uu == 0.0) {
      res.converged = true;
      break;
    }
    double s = 1.0 / std::sqrt(uu);
    for (auto& x : u.values) x *= s;
    v = std::move(u);
    vv = 1.0;
  }
  res.value = std::sqrt(best);
  return res;
}

OpNormResult l2_opnorm(const QuantizedOperator& T, const PowerOptions& opt) { return l2_opnorm(as_linear(T), opt); }

LogFit fit_log2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_log2: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0 && std::isfinite(y[i])) {
      xs.push_back(x[i]);
      ys.push_back(std::log2(y[i]));
    }
  }
  LogFit f;
  f.points = static_cast<int>(xs.size());
  if (xs.size() < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (f.intercept + f.slope * xs[i]);
    sse += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

const OrthoEntry& OrthoMatrix::at(int j, int k) const {
  int w = j_hi - j_lo + 1;
  return entries.at(static_cast<std::size_t>((j - j_lo) * w + (k - j_lo)));
}

OrthoMatrix ortho_experiment(const SymbolDescriptor& s, int j_lo, int j_hi, const GridSpec& grid,
                             const PowerOptions& opt, const OrthoCriteria& crit) {
  if (!(s.delta < s.rho)) throw std::invalid_argument("ortho_experiment: needs delta < rho");
  if (j_lo < 0 || j_hi < j_lo) throw std::invalid_argument("ortho_experiment: bad j range");
  OrthoMatrix om;
  om.j_lo = j_lo;
  om.j_hi = j_hi;
  std::vector<LinearOperator> T;
  for (int j = j_lo; j <= j_hi; ++j) {
    DecompositionIndex idx;
    idx.j = {j};
    T.push_back(as_linear(QuantizedOperator(derived_symbol(s, DerivedKind::annulus_j, idx), grid)));
  }
  int w = j_hi - j_lo + 1;
  om.entries.resize(static_cast<std::size_t>(w * w));
  // Cells are independent; each writes only its own slot.
  parallel_for(om.entries.size(), [&](std::size_t c) {
    int a = static_cast<int>(c) / w, b = static_cast<int>(c) % w;
    OrthoEntry e;
    e.j = j_lo + a;
    e.k = j_lo + b;
    auto r1 = l2_opnorm(compose(adjoint_of(T[a]), T[b]), opt);
    auto r2 = l2_opnorm(compose(T[a], adjoint_of(T[b])), opt);
    e.value = r1.value;
    e.value_star = r2.value;
    e.iterations = std::max(r1.iterations, r2.iterations);
    e.converged = r1.converged && r2.converged;
    om.entries[c] = e;
  }, 2);
  for (int a = 0; a < w; ++a) om.norms.push_back(l2_opnorm(T[a], opt).value);
  std::vector<double> xs, ys;
  bool all_zero = true;
  for (const auto& e : om.entries) {
    if (!e.converged) ++om.nonconverged;
    if (std::abs(e.j - e.k) < 2 || e.j > e.k) continue;
    om.max_far = std::max({om.max_far, e.value, om.at(e.k, e.j).value});
    all_zero = all_zero && e.value <= crit.zero_tol && om.at(e.k, e.j).value <= crit.zero_tol;
    xs.push_back(e.j + e.k);
    ys.push_back(e.value);
  }
  if (xs.empty()) {
    om.verdict = "FAIL";
    return om;
  }
  if (all_zero) {
    om.verdict = "exact-orthogonal";
    om.pass = true;
    return om;
  }
  LogFit f = fit_log2(xs, ys);
  om.fitted_epsilon = -f.slope;
  om.fitted_A = std::exp2(f.intercept);
  om.r2 = f.r2;
  om.fit_points = f.points;
  om.pass = om.fitted_epsilon >= crit.min_epsilon && om.r2 >= crit.min_r2;
  om.verdict = om.pass ? "PASS" : "FAIL";
  return om;
}

KernelDecayReport kernel_decay_experiment(const SymbolDescriptor& s, int j, int ell_lo, int ell_hi,
                                          const std::vector<std::vector<double>>& x_samples, const GridSpec& grid,
                                          double r, int ell_max, double slope_slack,
                                          const std::vector<double>& b_list) {
  KernelDecayReport rep;
  rep.j = j;
  rep.r = r;
  rep.ell_max = ell_max > 0 ? ell_max : default_ell_max(grid.N);
  rep.target_slope = -0.5 * s.split.n1;
  rep.max_slope = rep.target_slope + slope_slack;
  rep.b_list = b_list;
  if (ell_lo > ell_hi || ell_lo < -rep.ell_max || ell_hi > rep.ell_max)
    throw std::invalid_argument("kernel_decay_experiment: ell range outside [-ell_max, ell_max]");
  if (x_samples.empty()) throw std::invalid_argument("kernel_decay_experiment: no x samples");
  for (int l = ell_lo; l <= ell_hi; ++l) {
    DecompositionIndex idx;
    idx.j = {j};
    idx.ell = l;
    idx.r = r;
    idx.ell_max = rep.ell_max;
    SymbolDescriptor cone = derived_symbol(s, DerivedKind::cone_lj, idx);
    std::vector<double> vals(x_samples.size());
    parallel_for(x_samples.size(), [&](std::size_t i) { vals[i] = kernel_l1(cone, grid, x_samples[i]); }, 2);
    rep.ells.push_back(l);
    rep.values.push_back(*std::max_element(vals.begin(), vals.end()));
    std::vector<KernelSplit> sp;
    for (double b : b_list) sp.push_back(kernel_l1_split(cone, grid, x_samples.front(), b));
    rep.splits.push_back(std::move(sp));
  }
  bool all_zero = std::all_of(rep.values.begin(), rep.values.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    rep.verdict = "degenerate";
    rep.pass = true;
    return rep;
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < rep.ells.size(); ++i) {
    xs.push_back(rep.ells[i]);
    ys.push_back(rep.values[i]);
  }
  rep.fit = fit_log2(xs, ys);
  rep.pass = rep.fit.points >= 2 && rep.fit.slope <= rep.max_slope;
  rep.verdict = rep.pass ? "PASS" : "FAIL";
  return rep;
}

BoundednessReport l2_uniformity_sweep(const SymbolDescriptor& s, const std::vector<int>& N_list, double L,
                                      bool expected_fail, const PowerOptions& opt, const SweepCriteria& crit) {
  if (!(s.delta < s.rho)) throw std::invalid_argument("l2_uniformity_sweep: needs delta < rho");
  if (N_list.empty() || sorted_unique(N_list) != N_list)
    throw std::invalid_argument("l2_uniformity_sweep: N_list must be strictly increasing");
  BoundednessReport rep;
  rep.id = "l2_uniformity";
  rep.symbol = s.name;
  rep.m = s.order.m;
  rep.rho = s.rho;
  rep.delta = s.delta;
  rep.p = 2.0;
  rep.expected_fail = expected_fail;
  for (int N : N_list) {
    GridSpec g = make_grid(s.split.n1, s.split.n2, N, L);
    auto res = l2_opnorm(QuantizedOperator(s, g), opt);
    rep.Ns.push_back(N);
    rep.values.push_back(res.value);
    rep.iterations.push_back(res.iterations);
    rep.witnesses.push_back(res.converged ? "power_iteration" : "power_iteration(not converged)");
  }
  finish_sweep(rep, crit);
  return rep;
}

BoundednessReport bmo_experiment(const SymbolDescriptor& s, const std::vector<int>& N_list, double L,
                                 std::uint64_t seed, bool expected_fail, const SweepCriteria& crit) {
  if (!(s.delta < s.rho)) throw std::invalid_argument("bmo_experiment: needs delta < rho");
  if (N_list.empty() || sorted_unique(N_list) != N_list)
    throw std::invalid_argument("bmo_experiment: N_list must be strictly increasing");
  BoundednessReport rep;
  rep.id = "bmo";
  rep.symbol = s.name;
  rep.m = s.order.m;
  rep.rho = s.rho;
  rep.delta = s.delta;
  rep.p = kInfinity;
  rep.expected_fail = expected_fail;
  for (int N : N_list) {
    GridSpec g = make_grid(s.split.n1, s.split.n2, N, L);
    QuantizedOperator T(s, g);
    auto battery = standard_battery(g, seed);
    double best = 0.0;
    std::string who = "none";
    for (const auto& nf : battery) {
      double d = lp_norm(nf.field, kInfinity);
      if (d == 0.0) continue;
      double ratio = bmo_norm(T.apply(nf.field)) / d;
      if (ratio > best) {
        best = ratio;
        who = nf.name;
      }
    }
    rep.Ns.push_back(N);
    rep.values.push_back(best);
    rep.witnesses.push_back(who);
    rep.iterations.push_back(0);
  }
  finish_sweep(rep, crit);
  return rep;
}

double SharpnessTable::flip(std::size_t ip) const {
  for (std::size_t im = 0; im < m_grid.size(); ++im)
    if (!at(ip, im).bounded) return m_grid[im];
  return std::numeric_limits<double>::quiet_NaN();
}

bool SharpnessTable::monotone(std::size_t ip) const {
  bool growing = false;
  for (std::size_t im = 0; im < m_grid.size(); ++im) {
    if (!at(ip, im).bounded)
      growing = true;
    else if (growing)
      return false;
  }
  return true;
}

SharpnessTable sharpness_scan(double rho, const std::vector<double>& p_list, const std::vector<double>& m_grid,
                              const std::vector<int>& N_list, double L, std::uint64_t seed, Split split) {
  if (N_list.size() < 2 || sorted_unique(N_list) != N_list)
    throw std::invalid_argument("sharpness_scan: N_list needs at least two increasing sizes");
  for (double p : p_list)
    if (!(p >= 1.0)) throw std::invalid_argument("sharpness_scan: p must be >= 1");
  if (!std::is_sorted(m_grid.begin(), m_grid.end()))
    throw std::invalid_argument("sharpness_scan: m_grid must be increasing");
  SharpnessTable tab;
  tab.rho = rho;
  tab.split = split;
  tab.p_list = p_list;
  tab.m_grid = m_grid;
  tab.Ns = N_list;
  tab.cells.resize(p_list.size() * m_grid.size());
  for (std::size_t ip = 0; ip < p_list.size(); ++ip)
    for (std::size_t im = 0; im < m_grid.size(); ++im) {
      auto& c = tab.cells[ip * m_grid.size() + im];
      c.m = m_grid[im];
      c.p = p_list[ip];
    }
  std::vector<double> lx;
  for (int N : N_list) lx.push_back(std::log2(static_cast<double>(N)));
  for (int N : N_list) {
    GridSpec g = make_grid(split.n1, split.n2, N, L);
    for (std::size_t im = 0; im < m_grid.size(); ++im) {
      SymbolDescriptor s = builtin("oscillatory_exotic", {{"rho", rho}, {"m", m_grid[im]}}, split);
      QuantizedOperator T(s, g);
      // Only inputs that refine with N: a fixed function has a ratio that
      // settles as N grows and, inside the max, hides the growth of the rest.
      auto battery = grid_sign_fields(g, seed);
      for (auto&& f : standard_battery(g, seed))
        if (f.name.rfind("lacunary_", 0) == 0) battery.push_back(std::move(f));
      auto packets = focusing_packets(s, g);
      battery.insert(battery.end(), packets.begin(), packets.end());
      std::vector<SampledField> images(battery.size());
      parallel_for(battery.size(), [&](std::size_t i) { images[i] = T.apply(battery[i].field); }, 2);
      for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
        double p = p_list[ip];
        double best = 0.0;
        std::string who = "none";
        for (std::size_t i = 0; i < battery.size(); ++i) {
          double den = std::isinf(p) ? lp_norm(battery[i].field, kInfinity) : lp_norm(battery[i].field, p);
          if (den == 0.0) continue;
          double num = std::isinf(p) ? bmo_norm(images[i]) : lp_norm(images[i], p);
          if (num / den > best) {
            best = num / den;
            who = battery[i].name;
          }
        }
        auto& c = tab.cells[ip * m_grid.size() + im];
        c.values.push_back(best);
        c.witnesses.push_back(who);
      }
    }
  }
  for (auto& c : tab.cells) {
    c.exponent = fit_log2(lx, c.values).slope;
    c.bounded = c.exponent <= tab.bounded_exponent;
  }
  return tab;
}

CommutatorReport commutator_check(const SymbolDescriptor& s, const GridSpec& grid, const DyadicCube& Q, double rho,
                                  std::uint64_t seed) {
  Mollifier lam = mollifier_lambda(grid, Q, rho);
  CommutatorReport rep;
  rep.M = lam.M;
  rep.r = lam.r;
  for (const auto& v : lam.values.values) rep.lambda_max = std::max(rep.lambda_max, v.real());
  DecompositionIndex idx;
  idx.r = lam.r;
  SymbolDescriptor s1 = derived_symbol(s, DerivedKind::high_r, idx);
  SymbolDescriptor th = derived_symbol(s1, DerivedKind::theta, idx, &lam);
  QuantizedOperator T1(s1, grid), Tth(th, grid);
  // ζ + η must stay inside the lattice for the discrete identity to be exact.
  rep.band = grid.N / 2 - 1 - 2 * lam.M;
  if (rep.band < 0) throw MollifierInfeasible("commutator_check: grid too coarse for the mollifier spectrum");
  for (const auto& nf : standard_battery(grid, seed)) {
    SampledField f = band_limit(nf.field, rep.band);
    double fn = lp_norm(f, 2.0);
    if (fn == 0.0) continue;
    SampledField lf(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) lf[p] = lam.values[p] * f[p];
    SampledField a = T1.apply(f), b = T1.apply(lf), c = Tth.apply(f);
    SampledField d(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) d[p] = lam.values[p] * a[p] - b[p] - c[p];
    double e = lp_norm(d, 2.0) / fn;
    rep.errors.push_back(e);
    rep.max_rel_error = std::max(rep.max_rel_error, e);
  }
  return rep;
}

ConjugationReport conjugation_check(const SymbolDescriptor& s, const std::vector<int>& j, double rho,
                                    const GridSpec& grid, int points, std::uint64_t seed) {
  DecompositionIndex idx;
  idx.j = j;
  SymbolDescriptor tj = derived_symbol(s, DerivedKind::annulus_j, idx);
  ScalingOp fwd = scaling_for(j, rho, s.split, ScaleDirection::forward);
  ScalingOp inv = scaling_for(j, rho, s.split, ScaleDirection::inverse);
  SymbolDescriptor tilde = scaled_symbol(tj, fwd);
  auto factors = fwd.axis_factors();

  std::mt19937_64 rng(seed);
  SampledField f(grid);
  for (auto& v : f.values) v = cplx(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
  LatticeCoefficients c = LatticeCoefficients::from_field(f);
  LatticeCoefficients cs = scaling_apply(inv, c);
  QuantizedOperator T(tj, grid);

  std::vector<std::vector<double>> xs(points, std::vector<double>(grid.n()));
  for (auto& x : xs)
    for (auto& v : x) v = unit(rng) * grid.L;
  std::vector<cplx> lhs(points), rhs(points);
  parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
    lhs[i] = T.apply_at(f, xs[i]);
    std::vector<double> sx(grid.n());
    for (int a = 0; a < grid.n(); ++a) sx[a] = factors[a] * xs[i][a];
    rhs[i] = quantized_sum_at(tilde, cs, sx);
  }, 2);
  double scale = 0.0;
  for (const auto& v : lhs) scale = std::max(scale, std::abs(v));
  ConjugationReport rep;
  rep.points = points;
  for (int i = 0; i < points; ++i)
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(lhs[i] - rhs[i]) / std::max(scale, 1e-300));
  return rep;
}

}  // namespace bipdo
