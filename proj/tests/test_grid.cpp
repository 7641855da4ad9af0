#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bipdo/field_io.hpp"
#include "bipdo/grid.hpp"
#include "test_support.hpp"

using namespace bipdo;
using namespace bipdo::testing;

namespace {

// Mean oscillation over every axis-aligned cube of every integer side at every
// anchor, written independently of the library.
double all_cubes_bmo(const SampledField& f) {
  const GridSpec& g = f.grid;
  double best = 0.0;
  for (int side = 1; side <= g.N; ++side)
    for (int a0 = 0; a0 < g.N; ++a0)
      for (int a1 = 0; a1 < g.N; ++a1) {
        cplx mean = 0.0;
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < side; ++j) mean += f[((a0 + i) % g.N) * g.N + (a1 + j) % g.N];
        mean /= static_cast<double>(side * side);
        double osc = 0.0;
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < side; ++j) osc += std::abs(f[((a0 + i) % g.N) * g.N + (a1 + j) % g.N] - mean);
        best = std::max(best, osc / (side * side));
      }
  return best;
}

}  // namespace

TEST(Grid, ConstructionAndValidation) {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  EXPECT_EQ(g.n(), 2);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_EQ(make_grid(2, 1, 16, 2 * std::numbers::pi).size(), 4096u);
  EXPECT_THROW(make_grid(1, 1, 3, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(1, 1, 2, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(1, 1, 8, 0.0), std::invalid_argument);
  EXPECT_THROW(make_grid(0, 1, 8, 1.0), std::invalid_argument);
}

TEST(Grid, IndexingRoundTrips) {
  GridSpec g = make_grid(2, 1, 6, 3.0);
  std::vector<int> idx(3);
  std::vector<double> x(3), xi(3);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.unflatten(p, idx.data());
    EXPECT_EQ(g.flatten(idx.data()), p);
    g.point(p, x.data());
    g.frequency(p, xi.data());
    for (int a = 0; a < 3; ++a) {
      EXPECT_DOUBLE_EQ(x[a], idx[a] * 3.0 / 6);
      EXPECT_DOUBLE_EQ(xi[a], g.freq_of_index(idx[a]) / 3.0);
    }
  }
  EXPECT_EQ(g.freq_of_index(2), 2);
  EXPECT_EQ(g.freq_of_index(3), -3);
  EXPECT_EQ(g.index_of_freq(-1), 5);
}

TEST(Dft, MatchesDirectSum) {
  for (auto g : {make_grid(1, 1, 8, 1.0), make_grid(2, 1, 4, 2.5)}) {
    std::mt19937_64 rng(11);
    SampledField f = random_field(g, rng);
    SampledField fh = dft_forward(f);
    int n = g.n();
    std::vector<double> x(n), xi(n);
    double err = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
      g.frequency(q, xi.data());
      cplx acc = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        g.point(p, x.data());
        double ph = 0.0;
        for (int a = 0; a < n; ++a) ph += x[a] * xi[a];
        acc += f[p] * std::polar(1.0, -2.0 * std::numbers::pi * ph);
      }
      err = std::max(err, std::abs(acc * g.cell_volume() - fh[q]));
    }
    EXPECT_LT(err, 1e-12 * sup_abs(fh));
    EXPECT_LT(max_abs_diff(dft_inverse(fh), f), 1e-12 * sup_abs(f));
  }
}

TEST(Dft, ConstantAndSingleMode) {
  GridSpec g = make_grid(1, 1, 8, 2.0);
  SampledField one(g);
  for (auto& v : one.values) v = 1.0;
  SampledField oh = dft_forward(one);
  EXPECT_NEAR(std::abs(oh[0] - cplx(4.0)), 0.0, 1e-13);  // L^n
  for (std::size_t q = 1; q < g.size(); ++q) EXPECT_LT(std::abs(oh[q]), 1e-13);

  SampledField mode(g);
  std::vector<double> x(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.point(p, x.data());
    mode[p] = std::polar(1.0, 2.0 * std::numbers::pi * (3 * x[0] - 2 * x[1]) / g.L);
  }
  SampledField mh = dft_forward(mode);
  int ks[2] = {g.index_of_freq(3), g.index_of_freq(-2)};
  std::size_t target = g.flatten(ks);
  for (std::size_t q = 0; q < g.size(); ++q)
    EXPECT_NEAR(std::abs(mh[q]), q == target ? 4.0 : 0.0, 1e-12);
}

TEST(Norms, ParsevalAndConstants) {
  GridSpec g = make_grid(1, 1, 16, 2.0);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 5; ++t) {
    SampledField f = random_field(g, rng);
    SampledField fh = dft_forward(f);
    double s = 0.0;
    for (const auto& v : fh.values) s += std::norm(v);
    double lhs = std::pow(lp_norm(f, 2.0), 2), rhs = s / std::pow(g.L, g.n());
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * lhs);
  }
  GridSpec u = make_grid(1, 1, 8, 1.0);
  SampledField c(u);
  for (auto& v : c.values) v = cplx(0.0, -3.0);
  for (double p : {1.0, 1.5, 2.0, 4.0, kInfinity}) EXPECT_NEAR(lp_norm(c, p), 3.0, 1e-13);
  SampledField spike(u);
  spike[5] = 1.0;
  EXPECT_NEAR(lp_norm(spike, 1.0), 1.0 / 64, 1e-15);
  EXPECT_THROW(lp_norm(spike, 0.5), std::invalid_argument);
}

TEST(Norms, MonotoneInPOnUnitTorus) {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    SampledField f = random_field(g, rng);
    double prev = 0.0;
    for (double p : {1.0, 1.3, 2.0, 3.0, 6.0, kInfinity}) {
      double v = lp_norm(f, p);
      EXPECT_GE(v, prev * (1 - 1e-14));
      prev = v;
    }
  }
}

TEST(Bmo, HalfPlaneAgainstExhaustiveOracle) {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  SampledField f(g);
  std::vector<int> idx(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.unflatten(p, idx.data());
    f[p] = idx[0] < 4 ? 1.0 : -1.0;
  }
  double ours = bmo_norm(f), oracle = all_cubes_bmo(f);
  EXPECT_GT(ours, 0.0);
  EXPECT_LE(ours, oracle + 1e-12);
  EXPECT_GE(ours, 0.75 * oracle);
}

TEST(Bmo, RandomFieldsBoundedByOracleAndSup) {
  GridSpec g = make_grid(1, 1, 8, 1.0);
  std::mt19937_64 rng(14);
  for (int t = 0; t < 5; ++t) {
    SampledField f = random_field(g, rng);
    double b = bmo_norm(f);
    EXPECT_LE(b, all_cubes_bmo(f) + 1e-12);
    EXPECT_LE(b, 2.0 * lp_norm(f, kInfinity));
  }
}

TEST(Bmo, InvariantUnderConstantsAndShifts) {
  GridSpec g = make_grid(1, 1, 16, 1.0);
  std::mt19937_64 rng(15);
  SampledField f = random_field(g, rng);
  SampledField c(g), shifted(g);
  for (auto& v : c.values) v = 2.5;
  EXPECT_EQ(bmo_norm(c), 0.0);
  SampledField plus = f;
  for (auto& v : plus.values) v += cplx(7.0, -1.0);
  EXPECT_NEAR(bmo_norm(plus), bmo_norm(f), 1e-12);
  std::vector<int> idx(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.unflatten(p, idx.data());
    int src[2] = {(idx[0] + 3) % 16, (idx[1] + 11) % 16};
    shifted[p] = f[g.flatten(src)];
  }
  EXPECT_NEAR(bmo_norm(shifted), bmo_norm(f), 1e-12);
}

TEST(Bmo, MeanOscillationOfCheckerboardCell) {
  GridSpec g = make_grid(1, 1, 4, 1.0);
  SampledField f(g);
  std::vector<int> idx(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.unflatten(p, idx.data());
    f[p] = (idx[0] + idx[1]) % 2 ? 1.0 : -1.0;
  }
  EXPECT_NEAR(mean_oscillation(f, DyadicCube{{0, 0}, 2}), 1.0, 1e-15);
  EXPECT_NEAR(mean_oscillation(f, DyadicCube{{1, 3}, 1}), 0.0, 1e-15);
  EXPECT_THROW(mean_oscillation(f, DyadicCube{{0}, 2}), std::invalid_argument);
}

TEST(FieldIo, BinaryAndJsonRoundTrip) {
  GridSpec g = make_grid(1, 1, 8, 1.5);
  std::mt19937_64 rng(16);
  SampledField f = random_field(g, rng);
  auto dir = std::filesystem::temp_directory_path() / "bipdo_field_io";
  std::filesystem::create_directories(dir);
  save_field((dir / "f.fld").string(), f);
  SampledField b = load_field((dir / "f.fld").string());
  EXPECT_EQ(b.grid, g);
  EXPECT_LT(max_abs_diff(b, f), 1e-6);  // complex64 storage
  EXPECT_EQ(std::filesystem::file_size(dir / "f.fld"), 32u + 8u * g.size());
  save_field((dir / "f.json").string(), f);
  SampledField j = load_field((dir / "f.json").string());
  EXPECT_EQ(j.grid, g);
  EXPECT_EQ(max_abs_diff(j, f), 0.0);
  std::filesystem::remove_all(dir);
}

TEST(FieldIo, RejectsBadMagic) {
  auto path = std::filesystem::temp_directory_path() / "bipdo_bad.fld";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTAFIELD-------------------------------";
  }
  EXPECT_THROW(load_field(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(Grid, MismatchIsReported) {
  EXPECT_THROW(require_same_grid(make_grid(1, 1, 8, 1.0), make_grid(1, 1, 16, 1.0)), GridMismatch);
}
