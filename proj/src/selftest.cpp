#include "bipdo/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "bipdo/analysis.hpp"

namespace bipdo {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

SampledField random_field(const GridSpec& g, std::mt19937_64& rng) {
  SampledField f(g);
  for (auto& v : f.values) v = cplx(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
  return f;
}

double max_diff(const SampledField& a, const SampledField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double sup(const SampledField& a) {
  double e = 0.0;
  for (const auto& v : a.values) e = std::max(e, std::abs(v));
  return e;
}

SelfCheck check(std::string name, double error, double tol) {
  return SelfCheck{std::move(name), error, tol, error <= tol};
}

}  // namespace

std::vector<SelfCheck> identity_suite(int N, std::uint64_t seed) {
  constexpr double kTol = 1e-12;
  GridSpec g = make_grid(1, 1, N, 1.0);
  Split split{1, 1};
  std::mt19937_64 rng(seed);
  std::vector<SelfCheck> out;

  SampledField f = random_field(g, rng);
  out.push_back(check("dft_roundtrip", max_diff(dft_inverse(dft_forward(f)), f) / sup(f), kTol));

  QuantizedOperator one(builtin("constant", {{"c", 1.0}}, split), g);
  out.push_back(check("identity_symbol", max_diff(one.apply(f), f) / sup(f), kTol));

  {
    SymbolDescriptor s = builtin("multiplier_bessel", {{"m", -1.0}}, split);
    SampledField lhs = dft_forward(QuantizedOperator(s, g).apply(f));
    SampledField rhs = dft_forward(f);
    std::vector<double> x(2, 0.0), xi(2);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.frequency(p, xi.data());
      rhs[p] *= s(x, xi);
    }
    out.push_back(check("multiplier_diagonal", max_diff(lhs, rhs) / sup(dft_forward(f)), kTol));
  }

  {
    // Σ_j φ_j = 1 on the lattice, and the splice reflection φ(t) + φ(3 − t) = 1
    // that makes neighbouring pieces meet at 1/2.
    double e = 0.0;
    std::vector<double> xi(2);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.frequency(p, xi.data());
      double r = std::hypot(xi[0], xi[1]);
      int J = r <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(r))) + 1;
      double s = 0.0;
      for (int j = 0; j <= J; ++j) s += phi_j(xi, j);
      e = std::max(e, std::abs(s - 1.0));
    }
    for (int i = 0; i <= 100; ++i) {
      double t = 1.0 + i / 100.0;
      e = std::max(e, std::abs(varphi(t) + varphi(3.0 - t) - 1.0));
    }
    out.push_back(check("partition", e, kTol));
  }

  {
    int lmax = default_ell_max(N);
    double e = 0.0;
    std::vector<double> xi(2);
    auto sum_at = [&](double a, double b) {
      double s = 0.0;
      for (int l = -lmax; l <= lmax; ++l) s += delta_ell(std::span<const double>(&a, 1), std::span<const double>(&b, 1), l, lmax);
      return s;
    };
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.frequency(p, xi.data());
      e = std::max(e, std::abs(sum_at(xi[0], xi[1]) - 1.0));
    }
    for (int i = 0; i < 200; ++i) e = std::max(e, std::abs(sum_at(N * (unit(rng) - 0.5), N * (unit(rng) - 0.5)) - 1.0));
    out.push_back(check("cone_partition", e, kTol));
  }

  {
    double e = 0.0;
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x = {20.0 * unit(rng) - 10.0, 20.0 * unit(rng) - 10.0};
      double s = 0.0;
      for (int a = -2; a <= 3; ++a)
        for (int b = -2; b <= 3; ++b) {
          std::vector<int> k = {static_cast<int>(std::floor(x[0])) + a, static_cast<int>(std::floor(x[1])) + b};
          s += cube_partition(x, k);
        }
      e = std::max(e, std::abs(s - 1.0));
    }
    out.push_back(check("cube_partition", e, kTol));
  }

  {
    // The whole torus as Q forces M = 0, so λ is constant and θ vanishes.
    DyadicCube Q{{0, 0}, N};
    SymbolDescriptor s = builtin("oscillatory_exotic", {{"rho", 0.5}}, split);
    auto rep = commutator_check(s, g, Q, 0.5, seed);
    out.push_back(check("commutator_constant_lambda", rep.M == 0 ? rep.max_rel_error : kInfinity, kTol));
  }
  return out;
}

int selftest(std::ostream& out) {
  int failed = 0;
  std::vector<std::string> names;
  for (int N : {32, 4}) {
    for (const auto& c : identity_suite(N)) {
      out << (c.pass ? "ok   " : "FAIL ") << "N=" << N << ' ' << c.name << " error=" << c.error << " tol=" << c.tol
          << '\n';
      if (!c.pass) {
        ++failed;
        if (std::find(names.begin(), names.end(), c.name) == names.end()) names.push_back(c.name);
      }
    }
  }
  if (failed) {
    out << "selftest FAILED:";
    for (const auto& n : names) out << ' ' << n;
    out << '\n';
    return 1;
  }
  out << "selftest passed\n";
  return 0;
}

}  // namespace bipdo
