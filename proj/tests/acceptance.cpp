// One line per acceptance criterion: [PASS] or [FAIL], the measured numbers and
// the wall time. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "bipdo/analysis.hpp"
#include "bipdo/selftest.hpp"
#include "test_support.hpp"

using namespace bipdo;
using namespace bipdo::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Split kSplit{1, 1};

Outcome identity_suite_criterion() {
  Outcome o{true, ""};
  std::ostringstream os;
  for (const auto& c : identity_suite(32)) {
    o.pass = o.pass && c.pass;
    os << c.name << '=' << c.error << ' ';
  }
  o.detail = os.str();
  return o;
}

Outcome oracle_equivalence() {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  double worst_norm = 0.0, worst_adj = 0.0, worst_sep = 0.0;
  for (int i = 0; i < 10; ++i) {
    QuantizedOperator T(random_symbol(kSplit, 1.0, 100 + i), g);
    double oracle = dense_opnorm(T);
    worst_norm = std::max(worst_norm, std::abs(l2_opnorm(T).value - oracle) / oracle);
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    QuantizedOperator T(random_symbol(kSplit, 1.0, 200 + i), g);
    SampledField f = random_field(g, rng), h = random_field(g, rng);
    cplx lhs = inner(T.apply(f), h), rhs = inner(f, T.adjoint_apply(h));
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::abs(lhs));
  }
  for (int i = 0; i < 20; ++i) {
    SymbolDescriptor s = random_separable(kSplit, 1.0, 300 + i);
    SampledField f = random_field(g, rng);
    SampledField a = QuantizedOperator(s, g, Path::dense).apply(f);
    SampledField b = QuantizedOperator(s, g, Path::separable).apply(f);
    worst_sep = std::max(worst_sep, max_abs_diff(a, b) / sup_abs(a));
  }
  std::ostringstream os;
  os << "opnorm_rel=" << worst_norm << " adjoint_rel=" << worst_adj << " dense_vs_separable=" << worst_sep;
  return {worst_norm <= 1e-6 && worst_adj <= 1e-10 && worst_sep <= 1e-10, os.str()};
}

Outcome commutator_identity() {
  GridSpec g = make_grid(1, 1, 32, 1.0);
  SymbolDescriptor s = builtin("oscillatory_exotic", {{"rho", 0.5}, {"xmod", 0.5}, {"xwidth", 0.1}}, kSplit);
  auto generic = commutator_check(s, g, DyadicCube{{8, 8}, 4}, 0.5, kDefaultSeed);
  auto constant = commutator_check(s, g, DyadicCube{{0, 0}, 32}, 0.5, kDefaultSeed);
  std::ostringstream os;
  os << "generic=" << generic.max_rel_error << " (M=" << generic.M << ", max lambda=" << generic.lambda_max
     << ") constant=" << constant.max_rel_error << " (M=" << constant.M << ")";
  return {generic.M > 0 && generic.max_rel_error <= 1e-8 && constant.M == 0 && constant.max_rel_error <= 1e-12,
          os.str()};
}

Outcome scaling_conjugation() {
  GridSpec g = make_grid(1, 1, 32, 1.0);
  double worst = 0.0;
  for (double rho : {0.25, 0.5}) {
    SymbolDescriptor s = builtin("oscillatory_exotic", {{"rho", rho}, {"xmod", 0.5}, {"xwidth", 0.1}}, kSplit);
    for (int j1 = 0; j1 <= 4; ++j1)
      for (int j2 = 0; j2 <= 4; ++j2)
        worst = std::max(worst, conjugation_check(s, {j1, j2}, rho, g, 50, 1000 + 5 * j1 + j2).max_rel_error);
  }
  std::ostringstream os;
  os << "max_rel_error=" << worst << " over rho in {1/4,1/2}, j in [0,4]^2, 50 points each";
  return {worst <= 1e-8, os.str()};
}

Outcome almost_orthogonality() {
  GridSpec g = make_grid(1, 1, 64, 1.0);
  SymbolDescriptor s =
      builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}, {"xmod", 0.5}, {"xwidth", 0.05}}, kSplit);
  OrthoMatrix om = ortho_experiment(s, 1, 5, g);
  OrthoMatrix zero = ortho_experiment(builtin("multiplier_bessel", {{"m", 0.0}}, kSplit), 1, 5, g);
  std::ostringstream os;
  os << "epsilon=" << om.fitted_epsilon << " A=" << om.fitted_A << " r2=" << om.r2 << " far:";
  for (const auto& e : om.entries)
    if (e.k - e.j >= 2) os << " (" << e.j << ',' << e.k << ")=" << e.value;
  os << " | multiplier max_far=" << zero.max_far << " [" << zero.verdict << "]";
  return {om.pass && zero.verdict == "exact-orthogonal", os.str()};
}

Outcome kernel_cone_decay() {
  GridSpec g = make_grid(1, 1, 64, 1.0);
  SymbolDescriptor s = builtin("multiplier_bessel", {{"m", -0.5}, {"rho", 0.5}}, kSplit);
  std::vector<std::vector<double>> xs = {{0.0, 0.0}, {0.3, 0.7}, {0.55, 0.15}};
  auto rep = kernel_decay_experiment(s, 5, 0, 4, xs, g);
  std::ostringstream os;
  os << "slope=" << rep.fit.slope << " (need <= -0.35) values:";
  for (double v : rep.values) os << ' ' << v;
  return {rep.fit.slope <= -0.35, os.str()};
}

Outcome uniform_l2() {
  SymbolDescriptor ok = builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}}, kSplit);
  SymbolDescriptor bad = builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.5}}, kSplit);
  auto a = l2_uniformity_sweep(ok, {16, 32, 64}, 1.0);
  auto b = l2_uniformity_sweep(bad, {16, 32, 64}, 1.0, true);
  std::ostringstream os;
  os << "m=0: variation=" << a.variation << " [" << a.verdict << "]; m=1/2: growth=" << b.growth << " ["
     << b.verdict << "]";
  return {a.pass && a.variation <= 0.20 && b.pass && b.growth >= 0.25, os.str()};
}

Outcome bmo_critical() {
  SymbolDescriptor mult = builtin("multiplier_bessel", {{"m", -0.5}, {"rho", 0.5}}, kSplit);
  SymbolDescriptor mod = builtin("modulated_bessel", {{"m", -0.5}, {"rho", 0.5}, {"amp", 0.25}}, kSplit);
  auto a = bmo_experiment(mult, {16, 32, 64}, 1.0, kDefaultSeed);
  auto b = bmo_experiment(mod, {16, 32, 64}, 1.0, kDefaultSeed);
  std::ostringstream os;
  os << "multiplier variation=" << a.variation << " [" << a.verdict << "]; modulated variation=" << b.variation
     << " [" << b.verdict << "]";
  return {a.pass && b.pass, os.str()};
}

Outcome sharpness() {
  std::vector<double> ps = {4.0 / 3.0, 2.0, 4.0};
  std::vector<double> ms;
  for (int i = -5; i <= 3; ++i) ms.push_back(0.25 * i);
  auto tab = sharpness_scan(0.5, ps, ms, {16, 32, 64}, 1.0, kDefaultSeed, kSplit);
  const double step = 0.25, floor_m = -2.0 * (1.0 - 0.5);
  bool pass = true;
  std::ostringstream os;
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    double f = tab.flip(ip);
    bool mono = tab.monotone(ip);
    bool placed = ps[ip] == 2.0 ? std::abs(f) <= step + 1e-12 : (f <= 0.0 && f >= floor_m);
    pass = pass && mono && !std::isnan(f) && placed;
    os << "p=" << ps[ip] << " flip=" << f << (mono ? "" : " NONMONOTONE") << " exps:";
    for (std::size_t im = 0; im < ms.size(); ++im) os << ' ' << std::round(tab.at(ip, im).exponent * 1000) / 1000;
    os << "; ";
  }
  return {pass, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
    double budget_s;
  };
  std::vector<Criterion> list = {
      {"1", "identity suite", identity_suite_criterion, 60},
      {"2", "oracle equivalence", oracle_equivalence, 600},
      {"3", "commutator identity", commutator_identity, 120},
      {"4", "scaling conjugation", scaling_conjugation, 600},
      {"5", "almost-orthogonality decay", almost_orthogonality, 600},
      {"6", "kernel cone decay", kernel_cone_decay, 300},
      {"7", "uniform L2 bound", uniform_l2, 600},
      {"8", "BMO bound at critical order", bmo_critical, 600},
      {"9", "sharpness scan", sharpness, 1800},
  };
  int failed = 0;
  for (const auto& c : list) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_s;
    bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] criterion %s %s: %s (%.1fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(list.size()) - failed, list.size());
  return failed == 0 ? 0 : 1;
}
