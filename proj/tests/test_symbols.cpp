#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bipdo/symbols.hpp"

using namespace bipdo;

namespace {

const Split kSplit{1, 1};

ProbeSpec probes(double cap, int count = 40, std::uint64_t seed = 5) { return ProbeSpec::sample(kSplit, cap, count, seed); }

std::vector<double> v2(double a, double b) { return {a, b}; }

// Probes off the shells 1 < |ξ|, |ξ₁|, |ξ₂| < 2 where the cutoffs switch on;
// there the profile varies on scales below any usable difference step.
ProbeSpec away_from_cutoff_edges() {
  auto all = ProbeSpec::sample(kSplit, 64.0, 150, 77);
  ProbeSpec out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    double a = std::abs(all.xi[i][0]), b = std::abs(all.xi[i][1]);
    bool edge = false;
    for (double r : {a, b, std::hypot(a, b)}) edge = edge || (r > 0.9 && r < 2.2);
    if (!edge) out.add(all.x[i], all.xi[i]);
  }
  return out;
}

}  // namespace

TEST(Builtins, NamesAndParameterValidation) {
  EXPECT_EQ(builtin_catalog().size(), 6u);
  EXPECT_THROW(builtin("nope", {}), std::invalid_argument);
  EXPECT_THROW(builtin("constant", {}), std::invalid_argument);                  // c is required
  EXPECT_THROW(builtin("constant", {{"c", 1.0}, {"cc", 2.0}}), std::invalid_argument);
  EXPECT_THROW(builtin("oscillatory_exotic", {{"xwidth", 0.0}}), std::invalid_argument);
}

TEST(Builtins, ClosedFormValues) {
  auto one = builtin("constant", {{"c", 1.0}}, kSplit);
  EXPECT_EQ(one(v2(0.3, 0.1), v2(5.0, -7.0)), cplx(1.0));
  auto b = builtin("multiplier_bessel", {{"m", -1.0}}, kSplit);
  EXPECT_TRUE(b.x_independent);
  EXPECT_NEAR(std::abs(b(v2(0.2, 0.9), v2(3.0, 4.0)) - 1.0 / std::sqrt(26.0)), 0.0, 1e-15);
  auto e = builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}}, kSplit);
  EXPECT_EQ(std::abs(e(v2(0.0, 0.0), v2(0.0, 0.0))), 0.0);  // χ vanishes near the origin
  // Far from the origin χ = 1 and the phase is ⟨ξ₁⟩^{1/2} + ⟨ξ₂⟩^{1/2}.
  cplx far = e(v2(0.0, 0.0), v2(30.0, 40.0));
  double phase = std::sqrt(std::sqrt(901.0)) + std::sqrt(std::sqrt(1601.0));
  EXPECT_NEAR(std::abs(far - std::polar(1.0, phase)), 0.0, 1e-13);
}

TEST(Builtins, JetOracleAgreesWithFiniteDifferences) {
  std::vector<std::pair<std::string, Params>> cases = {
      {"multiplier_bessel", {{"m", -1.0}}},
      {"separable", {{"m1", -0.5}, {"m2", -1.0}}},
      {"oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}, {"xmod", 0.5}, {"xwidth", 0.2}}},
      {"riemann_singularity", {{"m1", -0.25}, {"m2", -0.25}}},
      {"modulated_bessel", {{"m", -0.5}, {"rho", 0.5}}},
  };
  for (const auto& [name, params] : cases) {
    auto s = builtin(name, params, kSplit);
    ASSERT_TRUE(s.has_oracle()) << name;
    int k = admissible_order(2);
    EXPECT_LE(oracle_fd_discrepancy(s, away_from_cutoff_edges(), k, k), 1e-5) << name;
    EXPECT_NO_THROW(builtin(name, params, kSplit, true)) << name;
  }
}

TEST(Builtins, CutoffEdgeDerivativeAgainstFineDifference) {
  // First ξ₁-derivative of the exotic symbol just inside the switch-on shell,
  // against a central difference with a step far below (|ξ|−1)².
  auto s = builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}}, kSplit);
  std::vector<int> a10 = {1, 0}, zero = {0, 0};
  auto x = v2(0.3, 0.6);
  for (double r : {1.02, 1.08, 1.5, 1.95}) {
    auto xi = v2(r * 0.6, r * 0.8);
    double h = 1e-7;
    cplx fd = (s(x, v2(xi[0] + h, xi[1])) - s(x, v2(xi[0] - h, xi[1]))) / (2 * h);
    cplx exact = s.derivative(a10, zero, x, xi);
    EXPECT_NEAR(std::abs(fd - exact), 0.0, 1e-6 * std::max(1.0, std::abs(exact))) << r;
  }
}

TEST(Builtins, BesselDerivativeClosedForm) {
  auto s = builtin("multiplier_bessel", {{"m", -1.0}}, kSplit);
  std::vector<int> a10 = {1, 0}, zero = {0, 0}, a11 = {1, 1};
  double x1 = 1.5, x2 = -2.0, q = 1 + x1 * x1 + x2 * x2;
  EXPECT_NEAR(std::abs(s.derivative(a10, zero, v2(0, 0), v2(x1, x2)) + x1 * std::pow(q, -1.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.derivative(a11, zero, v2(0, 0), v2(x1, x2)) - 3 * x1 * x2 * std::pow(q, -2.5)), 0.0,
              1e-14);
  EXPECT_EQ(s.derivative(zero, a10, v2(0.1, 0.2), v2(x1, x2)), cplx(0.0));
}

TEST(Seminorm, ConstantSymbolHasUnitNorm) {
  auto one = builtin("constant", {{"c", 1.0}}, kSplit);
  auto rep = seminorm(one, probes(32.0));
  EXPECT_NEAR(rep.seminorm, 1.0, 1e-14);
  EXPECT_EQ(rep.k, 2);
  EXPECT_EQ(rep.N_x, 2);
  EXPECT_TRUE(rep.class_ok);
}

TEST(Seminorm, OracleAndFiniteDifferencesAgreeForBessel) {
  auto s = builtin("multiplier_bessel", {{"m", -1.0}}, kSplit);
  auto with = seminorm(s, probes(32.0));
  SymbolDescriptor fd = s;
  fd.jet = nullptr;
  auto without = seminorm(fd, probes(32.0));
  EXPECT_TRUE(with.used_oracle);
  EXPECT_FALSE(without.used_oracle);
  EXPECT_NEAR(without.seminorm, with.seminorm, 1e-4 * with.seminorm);
}

TEST(Seminorm, ScalesLinearly) {
  for (const char* name : {"multiplier_bessel", "modulated_bessel"}) {
    auto s = builtin(name, {{"m", -0.5}}, kSplit);
    auto p = probes(64.0);
    double a = seminorm(s, p).seminorm;
    double b = seminorm(scaled_by(s, cplx(-2.0, 1.5)), p).seminorm;
    EXPECT_NEAR(b, 2.5 * a, 1e-12 * b) << name;
  }
}

TEST(Seminorm, DominatesWeightedValueAtEveryProbe) {
  auto s = builtin("modulated_bessel", {{"m", -1.0}}, kSplit);
  auto p = probes(64.0);
  double norm = seminorm(s, p).seminorm;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double r = std::hypot(p.xi[i][0], p.xi[i][1]);
    EXPECT_LE(std::abs(s(p.x[i], p.xi[i])) * std::pow(1 + r, 1.0), norm * (1 + 1e-12));
  }
}

TEST(ClassCheck, PlaneWaveFailsDeltaZero) {
  // e^{2πi x·ξ}: each x-derivative brings down |ξ|.
  auto eval = [](std::span<const double> x, std::span<const double> xi) {
    return std::polar(1.0, 2.0 * std::numbers::pi * (x[0] * xi[0] + x[1] * xi[1]));
  };
  auto s = make_symbol("plane_wave", kSplit, SymbolOrder{}, 1.0, 0.0, eval);
  auto rep = seminorm(s, probes(32.0));
  EXPECT_FALSE(rep.class_ok);
}

TEST(ClassCheck, ExoticSymbolIsInItsClass) {
  auto s = builtin("oscillatory_exotic", {{"rho", 0.5}, {"m", 0.0}}, kSplit);
  ClassSpec spec;
  spec.rho = 0.5;
  spec.delta = 0.0;
  EXPECT_TRUE(class_check(s, spec, probes(64.0)).ok);
  // Claiming full ρ = 1 decay is false for a phase ⟨ξ⟩^{1/2}.
  spec.rho = 1.0;
  EXPECT_FALSE(class_check(s, spec, probes(1e6)).ok);
}

TEST(ClassCheck, BiParameterProductOfBrackets) {
  auto s = builtin("separable", {{"m1", -1.0}, {"m2", -1.0}, {"amp", 0.0}}, kSplit);
  ClassSpec spec;
  spec.kind = ClassKind::biparameter;
  spec.m12 = std::make_pair(-1.0, -1.0);
  EXPECT_TRUE(class_check(s, spec, probes(64.0)).ok);
}

TEST(ClassCheck, ProductClassImpliesBiParameter) {
  // (1+|ξ|²)^{m/2} with m = m1 + m2, m1, m2 ≤ 0.
  for (double m1 : {-0.5, -1.0}) {
    for (double m2 : {0.0, -0.5}) {
      auto s = builtin("multiplier_bessel", {{"m", m1 + m2}}, kSplit);
      ClassSpec bi;
      bi.kind = ClassKind::biparameter;
      bi.m12 = std::make_pair(m1, m2);
      EXPECT_TRUE(class_check(s, ClassSpec{}, probes(64.0)).ok);
      EXPECT_TRUE(class_check(s, bi, probes(64.0)).ok) << m1 << ' ' << m2;
    }
  }
}

TEST(ClassCheck, ZeroSymbolHasZeroMargin) {
  auto z = builtin("constant", {{"c", 0.0}}, kSplit);
  auto r = class_check(z, ClassSpec{}, probes(32.0));
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(ClassCheck, MonotoneInRhoAndDelta) {
  auto s = builtin("modulated_bessel", {{"m", 0.0}, {"rho", 1.0}}, kSplit);
  auto p = probes(64.0);
  ClassSpec base;
  base.rho = 1.0;
  base.delta = 0.0;
  double m0 = class_check(s, base, p).margin;
  for (double rho : {0.75, 0.5}) {
    for (double delta : {0.0, 0.25}) {
      ClassSpec looser = base;
      looser.rho = rho;
      looser.delta = delta;
      auto r = class_check(s, looser, p);
      EXPECT_TRUE(r.ok);
      EXPECT_LE(r.margin, m0 * (1 + 1e-12));
    }
  }
}

TEST(BesselModulate, OrderBookkeepingAndValues) {
  auto one = builtin("constant", {{"c", 1.0}}, kSplit);
  auto g = bessel_modulate(one, -0.5);
  auto b = builtin("multiplier_bessel", {{"m", -1.0}}, kSplit);
  EXPECT_NEAR(std::abs(g(v2(0, 0), v2(3, 1)) - b(v2(0, 0), v2(3, 1))), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.order.m, -1.0);
  auto s = builtin("multiplier_bessel", {{"m", -1.0}, {"rho", 0.5}}, kSplit);
  EXPECT_DOUBLE_EQ(bessel_modulate(s, 0.5).order.m, 0.0);
  auto same = bessel_modulate(s, 0.0);
  EXPECT_EQ(same(v2(0.1, 0.2), v2(2, 7)), s(v2(0.1, 0.2), v2(2, 7)));
}
