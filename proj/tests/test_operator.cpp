#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bipdo/operator.hpp"
#include "test_support.hpp"

using namespace bipdo;
using namespace bipdo::testing;

namespace {

const Split kSplit{1, 1};

SymbolDescriptor gaussian_multiplier() {
  return make_multiplier("gaussian", kSplit, SymbolOrder{}, 1.0, [](std::span<const double> xi) {
    return cplx(std::exp(-std::numbers::pi * (xi[0] * xi[0] + xi[1] * xi[1])));
  });
}

}  // namespace

TEST(Apply, AgreesWithTheDirectDoubleSum) {
  GridSpec g = make_grid(1, 1, 8, 1.5);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 4; ++i) {
    SymbolDescriptor s = random_symbol(kSplit, g.L, 40 + i);
    SampledField f = random_field(g, rng);
    SampledField want = direct_apply(s, f);
    for (Path path : {Path::dense}) {
      SampledField got = QuantizedOperator(s, g, path).apply(f);
      EXPECT_LT(max_abs_diff(got, want), 1e-12 * sup_abs(want));
    }
    SymbolDescriptor sep = random_separable(kSplit, g.L, 40 + i);
    EXPECT_LT(max_abs_diff(QuantizedOperator(sep, g).apply(f), want), 1e-12 * sup_abs(want));
  }
}

TEST(Apply, LargeGridWithoutSymbolTable) {
  GridSpec g = make_grid(1, 1, 48, 1.0);
  ASSERT_GT(g.size(), kDenseTableMaxUnknowns);
  std::mt19937_64 rng(22);
  SymbolDescriptor s = random_symbol(kSplit, 1.0, 9);
  SampledField f = random_field(g, rng);
  SampledField want = direct_apply(s, f);
  EXPECT_LT(max_abs_diff(QuantizedOperator(s, g, Path::dense).apply(f), want), 1e-11 * sup_abs(want));
}

TEST(Apply, MultiplierCommutesWithGridShifts) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  QuantizedOperator T(builtin("riemann_singularity", {{"m1", -0.25}, {"m2", 0.0}}, kSplit), g);
  std::mt19937_64 rng(23);
  SampledField f = random_field(g, rng);
  auto shift = [&](const SampledField& u) {
    SampledField v(g);
    std::vector<int> idx(2);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.unflatten(p, idx.data());
      int src[2] = {(idx[0] + 5) % 16, (idx[1] + 9) % 16};
      v[p] = u[g.flatten(src)];
    }
    return v;
  };
  EXPECT_LT(max_abs_diff(T.apply(shift(f)), shift(T.apply(f))), 1e-13);
}

TEST(Apply, XOnlySymbolMultiplies) {
  GridSpec g = make_grid(1, 1, 16, 2.0);
  auto a = [](std::span<const double> x) { return cplx(std::cos(std::numbers::pi * x[0]), std::sin(std::numbers::pi * x[1])); };
  auto s = make_symbol("a", kSplit, SymbolOrder{}, 1.0, 0.0,
                       [a](std::span<const double> x, std::span<const double>) { return a(x); });
  std::mt19937_64 rng(24);
  SampledField f = random_field(g, rng);
  SampledField got = QuantizedOperator(s, g).apply(f);
  std::vector<double> x(2);
  double err = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.point(p, x.data());
    err = std::max(err, std::abs(got[p] - a(x) * f[p]));
  }
  EXPECT_LT(err, 1e-13);
}

TEST(Apply, AdjointAndPointEvaluation) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(25);
  for (int i = 0; i < 5; ++i) {
    for (const auto& s : {random_symbol(kSplit, 1.0, 60 + i), random_separable(kSplit, 1.0, 60 + i)}) {
      QuantizedOperator T(s, g);
      SampledField f = random_field(g, rng), h = random_field(g, rng);
      cplx lhs = inner(T.apply(f), h), rhs = inner(f, T.adjoint_apply(h));
      EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
      SampledField Tf = T.apply(f);
      std::vector<double> x(2);
      for (std::size_t p : {std::size_t{0}, std::size_t{37}, std::size_t{255}}) {
        g.point(p, x.data());
        EXPECT_LT(std::abs(T.apply_at(f, x) - Tf[p]), 1e-12 * sup_abs(Tf));
      }
    }
  }
}

TEST(Apply, Linearity) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  QuantizedOperator T(builtin("oscillatory_exotic", {{"rho", 0.5}, {"xmod", 0.5}}, kSplit), g);
  std::mt19937_64 rng(26);
  SampledField f = random_field(g, rng), h = random_field(g, rng), c(g);
  cplx a(0.3, -1.2), b(-2.0, 0.5);
  for (std::size_t p = 0; p < g.size(); ++p) c[p] = a * f[p] + b * h[p];
  SampledField lhs = T.apply(c), Tf = T.apply(f), Th = T.apply(h);
  for (std::size_t p = 0; p < g.size(); ++p) Tf[p] = a * Tf[p] + b * Th[p];
  EXPECT_LT(max_abs_diff(lhs, Tf), 1e-13 * sup_abs(lhs));
}

TEST(Apply, SeparableAndDensePathsAgree) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(27);
  for (int i = 0; i < 20; ++i) {
    SymbolDescriptor s = random_separable(kSplit, 1.0, 500 + i);
    SampledField f = random_field(g, rng);
    SampledField a = QuantizedOperator(s, g, Path::dense).apply(f);
    SampledField b = QuantizedOperator(s, g, Path::separable).apply(f);
    EXPECT_LT(max_abs_diff(a, b), 1e-12 * sup_abs(a));
  }
  EXPECT_EQ(QuantizedOperator(random_separable(kSplit, 1.0, 1), g).path(), Path::separable);
  EXPECT_EQ(QuantizedOperator(random_symbol(kSplit, 1.0, 1), g).path(), Path::dense);
}

TEST(Kernel, GaussianOnALargeTorus) {
  GridSpec g = make_grid(1, 1, 64, 8.0);
  std::vector<double> x = {0.0, 0.0};
  SampledField K = kernel_slice(gaussian_multiplier(), g, x);
  int at0[2] = {0, 0}, at1[2] = {8, 0}, atm[2] = {g.N - 4, g.N - 4};
  EXPECT_NEAR(std::abs(K[g.flatten(at0)] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(K[g.flatten(at1)] - std::exp(-std::numbers::pi)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(K[g.flatten(atm)] - std::exp(-std::numbers::pi * 0.5)), 0.0, 1e-12);
  EXPECT_NEAR(kernel_l1(gaussian_multiplier(), g, x), 1.0, 1e-10);
  KernelSplit sp = kernel_l1_split(gaussian_multiplier(), g, x, 1.0);
  EXPECT_NEAR(sp.inner + sp.outer, 1.0, 1e-10);
  EXPECT_NEAR(sp.outer, std::exp(-std::numbers::pi), 0.02);  // ∫_{|y|>1} e^{−π|y|²} dy
}

TEST(Kernel, L1IsHomogeneous) {
  GridSpec g = make_grid(1, 1, 32, 1.0);
  auto s = builtin("modulated_bessel", {{"m", -1.0}}, kSplit);
  std::vector<double> x = {0.2, 0.7};
  double base = kernel_l1(s, g, x);
  EXPECT_GT(base, 0.0);
  EXPECT_NEAR(kernel_l1(scaled_by(s, cplx(0.0, -3.0)), g, x), 3.0 * base, 1e-12 * base);
}

TEST(Scaling, NormsAndInverse) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(28);
  auto c = LatticeCoefficients::from_field(random_field(g, rng));
  for (double rho : {0.25, 0.5, 1.0})
    for (int j1 = 0; j1 <= 3; ++j1)
      for (int j2 = 0; j2 <= 3; ++j2) {
        auto fwd = scaling_for({j1, j2}, rho, kSplit);
        auto inv = scaling_for({j1, j2}, rho, kSplit, ScaleDirection::inverse);
        double want = std::exp2(-0.5 * rho * (j1 + j2));
        EXPECT_NEAR(scaling_apply(fwd, c).l2_norm(), want * c.l2_norm(), 1e-12 * c.l2_norm());
        auto back = scaling_apply(inv, scaling_apply(fwd, c));
        for (std::size_t i = 0; i < c.values.size(); ++i)
          EXPECT_NEAR(std::abs(back.values[i] - c.values[i]), 0.0, 1e-13);
        for (int a = 0; a < 2; ++a) EXPECT_NEAR(back.periods[a], c.periods[a], 1e-15);
      }
}

TEST(Scaling, ForwardScalingComposesWithPointEvaluation) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(29);
  SampledField f = random_field(g, rng);
  auto c = LatticeCoefficients::from_field(f);
  auto one = builtin("constant", {{"c", 1.0}}, kSplit);
  auto fwd = scaling_for({2, 1}, 0.5, kSplit);
  auto scaled = scaling_apply(fwd, c);
  auto s = fwd.axis_factors();
  for (double t : {0.0, 0.13, 0.4}) {
    std::vector<double> x = {t, 0.5 * t + 0.1}, sx = {s[0] * x[0], s[1] * x[1]};
    EXPECT_NEAR(std::abs(quantized_sum_at(one, scaled, x) - quantized_sum_at(one, c, sx)), 0.0, 1e-12);
  }
}

TEST(Bessel, PotentialsInvertEachOther) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(30);
  SampledField f = random_field(g, rng);
  for (double alpha : {0.25, 1.0, 1.5}) {
    SampledField back = bessel_apply(-alpha, bessel_apply(alpha, f));
    EXPECT_LT(max_abs_diff(back, f), 1e-12 * sup_abs(f));
  }
  SampledField once = bessel_apply(0.5, f);
  SampledField via = QuantizedOperator(builtin("multiplier_bessel", {{"m", -1.0}}, kSplit), g).apply(f);
  EXPECT_LT(max_abs_diff(once, via), 1e-13);
}

TEST(LinearOperators, ComposeAndAdjoint) {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  QuantizedOperator A(random_symbol(kSplit, 1.0, 70), g), B(random_symbol(kSplit, 1.0, 71), g);
  LinearOperator AB = compose(as_linear(A), as_linear(B));
  LinearOperator ABs = adjoint_of(AB);
  std::mt19937_64 rng(31);
  SampledField f = random_field(g, rng), h = random_field(g, rng);
  EXPECT_LT(max_abs_diff(AB.apply(f), A.apply(B.apply(f))), 1e-13);
  cplx lhs = inner(AB.apply(f), h), rhs = inner(f, ABs.apply(h));
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}
