#include "bipdo/battery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bipdo/profile.hpp"

namespace bipdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize_sup(SampledField& f) {
  double m = lp_norm(f, kInfinity);
  if (m > 0.0)
    for (auto& v : f.values) v /= m;
}

int log2_floor(int v) {
  int e = 0;
  while ((1 << (e + 1)) <= v) ++e;
  return e;
}

// Uniform double in [0,1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<NamedField> standard_battery(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NamedField> out;
  const int n = g.n();
  std::vector<int> idx(n);

  // Signs live on a fixed 8-per-axis block pattern of the torus, so every grid
  // samples the same function and sweeps over N compare like with like.
  constexpr int kCells = 8;
  std::size_t cells = 1;
  for (int a = 0; a < n; ++a) cells *= kCells;
  for (int i = 0; i < 8; ++i) {
    std::vector<double> sign(cells);
    for (auto& s : sign) s = (rng() >> 63) ? 1.0 : -1.0;
    SampledField f(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.unflatten(p, idx.data());
      std::size_t c = 0;
      for (int a = 0; a < n; ++a) c = c * kCells + static_cast<std::size_t>(idx[a]) * kCells / g.N;
      f[p] = sign[c];
    }
    out.push_back({"random_sign_" + std::to_string(i), std::move(f)});
  }

  const int K = std::max(1, log2_floor(g.N / 2));
  for (int i = 0; i < 4; ++i) {
    int axis = i % n;
    std::vector<double> sign(K);
    for (auto& s : sign) s = (rng() >> 63) ? 1.0 : -1.0;
    SampledField f(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.unflatten(p, idx.data());
      cplx acc = 0.0;
      for (int k = 0; k < K; ++k) acc += sign[k] * std::polar(1.0, kTwoPi * (1 << k) * idx[axis] / g.N);
      f[p] = acc / static_cast<double>(K);
    }
    normalize_sup(f);
    out.push_back({"lacunary_" + std::to_string(i), std::move(f)});
  }

  for (int i = 0; i < 4; ++i) {
    double width = 0.02 * (i + 1);  // fraction of the period
    double kappa = 1.0 / std::pow(kTwoPi * width, 2);
    int axis = i % n;
    std::vector<double> center(n);
    for (auto& c : center) c = unit(rng);
    SampledField f(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      g.unflatten(p, idx.data());
      double acc = 0.0;
      for (int t = 0; t < 4; ++t) {
        double e = 0.0;
        for (int a = 0; a < n; ++a) {
          double c = center[a] + (a == axis ? 0.25 * t : 0.0);
          e += std::cos(kTwoPi * (static_cast<double>(idx[a]) / g.N - c)) - 1.0;
        }
        acc += std::exp(kappa * e);
      }
      f[p] = acc;
    }
    normalize_sup(f);
    out.push_back({"bump_train_" + std::to_string(i), std::move(f)});
  }
  return out;
}

std::vector<NamedField> grid_sign_fields(const GridSpec& g, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);
  std::vector<NamedField> out;
  for (int i = 0; i < count; ++i) {
    SampledField f(g);
    for (auto& v : f.values) v = (rng() >> 63) ? 1.0 : -1.0;
    out.push_back({"grid_sign_" + std::to_string(i), std::move(f)});
  }
  return out;
}

std::vector<NamedField> focusing_packets(const SymbolDescriptor& s, const GridSpec& g) {
  if (!s.x_independent) throw std::invalid_argument("focusing_packets: needs an x-independent symbol");
  std::vector<NamedField> out;
  // Highest band whose support 2^{j+1} stays inside the Nyquist box.
  int top = static_cast<int>(std::floor(std::log2(g.N / (4.0 * g.L)) + 1e-12));
  std::vector<double> xi(g.n());
  std::vector<double> x0(g.n(), 0.0);
  for (int j : {top, top - 1}) {
    if (j < 1) continue;
    SampledField band(g), phased(g);
    for (std::size_t q = 0; q < g.size(); ++q) {
      g.frequency(q, xi.data());
      double c = phi_j_t<double>(xi.data(), g.n(), j);
      band[q] = c;
      cplx v = s.eval(x0, xi);
      phased[q] = std::abs(v) > 0.0 ? c * std::conj(v / std::abs(v)) : cplx(0.0);
    }
    SampledField f1 = dft_inverse(phased), f2 = dft_inverse(band);
    normalize_sup(f1);
    normalize_sup(f2);
    out.push_back({"focus_phase_j" + std::to_string(j), std::move(f1)});
    out.push_back({"focus_band_j" + std::to_string(j), std::move(f2)});
  }
  return out;
}

SampledField band_limit(const SampledField& f, int kmax) {
  SampledField h = dft_forward(f);
  std::vector<int> idx(f.grid.n());
  for (std::size_t q = 0; q < h.size(); ++q) {
    f.grid.unflatten(q, idx.data());
    for (int a = 0; a < f.grid.n(); ++a) {
      if (std::abs(f.grid.freq_of_index(idx[a])) > kmax) {
        h[q] = 0.0;
        break;
      }
    }
  }
  return dft_inverse(h);
}

}  // namespace bipdo
