#include "bipdo/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "bipdo/parallel.hpp"

namespace bipdo {

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < n(); ++a) s *= static_cast<std::size_t>(N);
  return s;
}

double GridSpec::cell_volume() const { return std::pow(L / N, n()); }

void GridSpec::unflatten(std::size_t flat, int* idx) const {
  for (int a = n() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N);
    flat /= N;
  }
}

std::size_t GridSpec::flatten(const int* idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < n(); ++a) flat = flat * N + static_cast<std::size_t>(idx[a]);
  return flat;
}

void GridSpec::point(std::size_t flat, double* x) const {
  int idx[16];
  unflatten(flat, idx);
  for (int a = 0; a < n(); ++a) x[a] = idx[a] * L / N;
}

void GridSpec::frequency(std::size_t flat, double* xi) const {
  int idx[16];
  unflatten(flat, idx);
  for (int a = 0; a < n(); ++a) xi[a] = freq_of_index(idx[a]) / L;
}

GridSpec make_grid(int n1, int n2, int N, double L) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("make_grid: n1 and n2 must be >= 1");
  if (n1 + n2 > 16) throw std::invalid_argument("make_grid: total dimension above 16");
  if (N < 4 || N % 2 != 0)
    throw std::invalid_argument("make_grid: N must be even and >= 4 (got " + std::to_string(N) + ")");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("make_grid: L must be positive");
  return GridSpec{n1, n2, N, L};
}

SampledField::SampledField(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw std::invalid_argument("SampledField: value count does not match grid");
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw GridMismatch("grid mismatch");
}

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int rank, int N, int sign) {
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_tuple(rank, N, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<int> dims(rank, N);
    std::size_t total = 1;
    for (int r = 0; r < rank; ++r) total *= N;
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(rank, dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache* cache = new PlanCache();  // leaked on purpose: plans outlive static teardown
  return *cache;
}

}  // namespace

void fft_inplace(const GridSpec& g, cplx* data, int sign) {
  fftw_plan p = plan_cache().get(g.n(), g.N, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

SampledField dft_forward(const SampledField& f) {
  SampledField out = f;
  fft_inplace(f.grid, out.values.data(), -1);
  double w = f.grid.cell_volume();
  for (auto& v : out.values) v *= w;
  return out;
}

SampledField dft_inverse(const SampledField& fhat) {
  SampledField out = fhat;
  fft_inplace(fhat.grid, out.values.data(), +1);
  double w = std::pow(1.0 / fhat.grid.L, fhat.grid.n());
  for (auto& v : out.values) v *= w;
  return out;
}

double lp_norm(const SampledField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * f.grid.cell_volume());
  }
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

namespace {

// Visits the flat indices of the periodic cube with lower corner `anchor`.
template <class F>
void for_each_in_cube(const GridSpec& g, const int* anchor, int side, F&& visit) {
  int n = g.n();
  int off[16] = {0};
  int idx[16];
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= static_cast<std::size_t>(side);
  for (std::size_t c = 0; c < count; ++c) {
    for (int a = 0; a < n; ++a) idx[a] = (anchor[a] + off[a]) % g.N;
    visit(g.flatten(idx));
    for (int a = n - 1; a >= 0; --a) {
      if (++off[a] < side) break;
      off[a] = 0;
    }
  }
}

double oscillation_at(const SampledField& f, const int* anchor, int side) {
  cplx mean = 0.0;
  std::size_t count = 0;
  for_each_in_cube(f.grid, anchor, side, [&](std::size_t i) {
    mean += f.values[i];
    ++count;
  });
  mean /= static_cast<double>(count);
  double dev = 0.0;
  for_each_in_cube(f.grid, anchor, side, [&](std::size_t i) { dev += std::abs(f.values[i] - mean); });
  return dev / static_cast<double>(count);
}

}  // namespace

double mean_oscillation(const SampledField& f, const DyadicCube& q) {
  const GridSpec& g = f.grid;
  if (static_cast<int>(q.anchor.size()) != g.n())
    throw std::invalid_argument("mean_oscillation: anchor dimension mismatch");
  if (q.side < 1 || q.side > g.N) throw std::invalid_argument("mean_oscillation: bad cube side");
  std::vector<int> a(q.anchor);
  for (auto& v : a) v = ((v % g.N) + g.N) % g.N;
  return oscillation_at(f, a.data(), q.side);
}

double bmo_norm(const SampledField& f) {
  const GridSpec& g = f.grid;
  double best = 0.0;
  for (int side = 2; side <= g.N; side *= 2) {
    if (side == g.N) {
      int zero[16] = {0};
      best = std::max(best, oscillation_at(f, zero, side));
      continue;
    }
    std::vector<double> osc(g.size());
    parallel_for(g.size(), [&](std::size_t flat) {
      int anchor[16];
      g.unflatten(flat, anchor);
      osc[flat] = oscillation_at(f, anchor, side);
    });
    for (double v : osc) best = std::max(best, v);
  }
  return best;
}

}  // namespace bipdo
