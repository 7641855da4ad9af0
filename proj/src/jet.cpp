#include "bipdo/jet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bipdo {

namespace {

void enumerate(const std::vector<int>& group_of_var, std::vector<int>& budget, std::size_t v,
               std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (v == group_of_var.size()) {
    out.push_back(cur);
    return;
  }
  int g = group_of_var[v];
  for (int d = 0; d <= budget[g]; ++d) {
    cur[v] = d;
    budget[g] -= d;
    enumerate(group_of_var, budget, v + 1, cur, out);
    budget[g] += d;
  }
  cur[v] = 0;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

MonomialSet::MonomialSet(int vars, std::vector<std::vector<int>> exponents) : vars_(vars) {
  std::stable_sort(exponents.begin(), exponents.end(), [](const auto& a, const auto& b) {
    return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(b.begin(), b.end(), 0);
  });
  exponents_ = std::move(exponents);
  int maxe = 0;
  for (const auto& e : exponents_) {
    max_degree_ = std::max(max_degree_, std::accumulate(e.begin(), e.end(), 0));
    for (int d : e) maxe = std::max(maxe, d);
  }
  radix_.assign(vars_, maxe + 1);

  std::vector<std::pair<std::int64_t, std::uint32_t>> kv;
  kv.reserve(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    std::int64_t key = 0;
    for (int v = 0; v < vars_; ++v) key = key * radix_[v] + exponents_[i][v];
    kv.emplace_back(key, static_cast<std::uint32_t>(i));
  }
  std::sort(kv.begin(), kv.end());
  for (auto& [k, i] : kv) {
    keys_.push_back(k);
    key_index_.push_back(i);
  }

  std::vector<int> sum(vars_);
  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    for (std::size_t b = 0; b < exponents_.size(); ++b) {
      for (int v = 0; v < vars_; ++v) sum[v] = exponents_[a][v] + exponents_[b][v];
      if (auto c = index_of(sum)) {
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(*c)});
      }
    }
  }
}

std::shared_ptr<const MonomialSet> MonomialSet::grouped(std::vector<int> group_of_var,
                                                        std::vector<int> group_limits) {
  for (int g : group_of_var) {
    if (g < 0 || g >= static_cast<int>(group_limits.size()))
      throw std::invalid_argument("MonomialSet: group index out of range");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> cur(group_of_var.size(), 0);
  enumerate(group_of_var, group_limits, 0, cur, out);
  return std::shared_ptr<const MonomialSet>(
      new MonomialSet(static_cast<int>(group_of_var.size()), std::move(out)));
}

std::shared_ptr<const MonomialSet> MonomialSet::box(std::vector<int> limits) {
  std::vector<int> groups(limits.size());
  std::iota(groups.begin(), groups.end(), 0);
  return grouped(std::move(groups), std::move(limits));
}

std::optional<std::size_t> MonomialSet::index_of(std::span<const int> gamma) const {
  if (static_cast<int>(gamma.size()) != vars_) return std::nullopt;
  std::int64_t key = 0;
  for (int v = 0; v < vars_; ++v) {
    if (gamma[v] < 0 || gamma[v] >= radix_[v]) return std::nullopt;
    key = key * radix_[v] + gamma[v];
  }
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return key_index_[it - keys_.begin()];
}

Jet Jet::variable(std::shared_ptr<const MonomialSet> set, int var, double at) {
  std::vector<cplx> c(set->size(), cplx{});
  c[0] = at;
  std::vector<int> e(set->vars(), 0);
  e[var] = 1;
  if (auto i = set->index_of(e)) c[*i] = 1.0;
  return Jet(std::move(set), std::move(c));
}

Jet Jet::constant(std::shared_ptr<const MonomialSet> set, cplx v) {
  std::vector<cplx> c(set->size(), cplx{});
  c[0] = v;
  return Jet(std::move(set), std::move(c));
}

cplx Jet::coefficient(std::span<const int> gamma) const {
  if (!set_) {
    for (int g : gamma)
      if (g != 0) return 0.0;
    return c_[0];
  }
  auto i = set_->index_of(gamma);
  return i ? c_[*i] : cplx{};
}

cplx Jet::derivative(std::span<const int> gamma) const {
  double f = 1.0;
  for (int g : gamma) f *= factorial(g);
  return f * coefficient(gamma);
}

void Jet::promote(const std::shared_ptr<const MonomialSet>& set) {
  if (set_ == set || !set) return;
  if (set_) throw std::invalid_argument("Jet: mixing jets over different monomial sets");
  cplx v = c_[0];
  c_.assign(set->size(), cplx{});
  c_[0] = v;
  set_ = set;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.set_) promote(o.set_);
  if (!o.set_) {
    c_[0] += o.c_[0];
    return *this;
  }
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.set_) promote(o.set_);
  if (!o.set_) {
    c_[0] -= o.c_[0];
    return *this;
  }
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!b.set_) {
    Jet r = a;
    r *= b.c_[0];
    return r;
  }
  if (!a.set_) {
    Jet r = b;
    r *= a.c_[0];
    return r;
  }
  if (a.set_ != b.set_) throw std::invalid_argument("Jet: mixing jets over different monomial sets");
  std::vector<cplx> c(a.c_.size(), cplx{});
  for (const auto& p : a.set_->products()) c[p.c] += a.c_[p.a] * b.c_[p.b];
  return Jet(a.set_, std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet Jet::compose(std::span<const cplx> derivs) const {
  if (!set_) return Jet(derivs[0]);
  int K = set_->max_degree();
  if (static_cast<int>(derivs.size()) < K + 1)
    throw std::invalid_argument("Jet::compose: not enough derivatives");
  Jet h = *this;
  h.c_[0] = 0.0;
  Jet r = Jet::constant(set_, derivs[K] / factorial(K));
  for (int k = K - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += derivs[k] / factorial(k);
  }
  return r;
}

namespace {

int order_of(const Jet& u) { return u.is_scalar() ? 0 : u.set()->max_degree(); }

}  // namespace

Jet exp(const Jet& u) {
  std::vector<cplx> d(order_of(u) + 1, std::exp(u.value()));
  return u.compose(d);
}

Jet log(const Jet& u) {
  int K = order_of(u);
  std::vector<cplx> d(K + 1);
  cplx v = u.value();
  d[0] = std::log(v);
  for (int k = 1; k <= K; ++k)
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * factorial(k - 1) / std::pow(v, k);
  return u.compose(d);
}

Jet pow(const Jet& u, double p) {
  int K = order_of(u);
  std::vector<cplx> d(K + 1);
  cplx v = u.value();
  double falling = 1.0;
  for (int k = 0; k <= K; ++k) {
    d[k] = falling == 0.0 ? cplx{} : falling * std::pow(v, p - k);
    falling *= (p - k);
  }
  return u.compose(d);
}

Jet sqrt(const Jet& u) { return pow(u, 0.5); }

Jet reciprocal(const Jet& u) {
  int K = order_of(u);
  std::vector<cplx> d(K + 1);
  cplx v = u.value();
  for (int k = 0; k <= K; ++k)
    d[k] = ((k % 2 == 0) ? 1.0 : -1.0) * factorial(k) / std::pow(v, k + 1);
  return u.compose(d);
}

Jet cos(const Jet& u) {
  int K = order_of(u);
  std::vector<cplx> d(K + 1);
  cplx c = std::cos(u.value()), s = std::sin(u.value());
  const cplx cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= K; ++k) d[k] = cyc[k % 4];
  return u.compose(d);
}

Jet sin(const Jet& u) {
  int K = order_of(u);
  std::vector<cplx> d(K + 1);
  cplx c = std::cos(u.value()), s = std::sin(u.value());
  const cplx cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= K; ++k) d[k] = cyc[k % 4];
  return u.compose(d);
}

Jet expi(const Jet& t) { return exp(Jet(cplx{0.0, 1.0}) * t); }

}  // namespace bipdo
