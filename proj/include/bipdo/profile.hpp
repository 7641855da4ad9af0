#pragma once

// The smooth step φ: 1 on [−1,1], 0 outside (−2,2), and on 1 < |t| < 2
//   φ(t) = g(2−|t|) / (g(|t|−1) + g(2−|t|)),   g(u) = e^{−1/u} (u > 0), 0 otherwise.
// Written over S ∈ {double, Jet} so cutoff derivatives come out exactly.

#include <atomic>
#include <cmath>

#include "bipdo/jet.hpp"

namespace bipdo {

namespace detail {
// Fault-injection hook for selftest: scales the transition region.
inline std::atomic<bool>& profile_corrupted() {
  static std::atomic<bool> flag{false};
  return flag;
}
}  // namespace detail

inline void set_profile_corruption(bool on) { detail::profile_corrupted().store(on); }

template <class S>
S varphi_t(const S& t) {
  using std::exp;
  double tv = std::abs(real_value(t));
  if (tv <= 1.0) return S(1.0);
  if (tv >= 2.0) return S(0.0);
  S u = abs_real(t) - S(1.0);
  S g1 = exp(-reciprocal(u));
  S g2 = exp(-reciprocal(S(1.0) - u));
  S v = g2 / (g1 + g2);
  if (detail::profile_corrupted().load(std::memory_order_relaxed)) v = v * S(0.999);
  return v;
}

/// φ(scale·|v|) for a vector v of length d; safe at v = 0 for jets because
/// the profile is flat there.
template <class S>
S varphi_norm(const S* v, int d, double scale) {
  using std::sqrt;
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) r2 += real_value(v[a]) * real_value(v[a]);
  double r = scale * std::sqrt(r2);
  if (r <= 1.0) return S(1.0);
  if (r >= 2.0) return S(0.0);
  S s = S(0.0);
  for (int a = 0; a < d; ++a) s = s + v[a] * v[a];
  return varphi_t<S>(S(scale) * sqrt(s));
}

/// φ_j(v) = φ(2^{−j}|v|) − φ(2^{−j+1}|v|), φ_0 = φ(|v|), with v scaled by `scale`.
template <class S>
S phi_j_t(const S* v, int d, int j, double scale = 1.0) {
  if (j == 0) return varphi_norm<S>(v, d, scale);
  return varphi_norm<S>(v, d, scale * std::ldexp(1.0, -j)) -
         varphi_norm<S>(v, d, scale * std::ldexp(1.0, -j + 1));
}

}  // namespace bipdo
