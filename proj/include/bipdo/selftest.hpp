#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bipdo/run_config.hpp"

namespace bipdo {

struct SelfCheck {
  std::string name;
  double error = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Exact identities on an n1 = n2 = 1 grid of side N: DFT roundtrip, σ ≡ 1,
/// multiplier diagonalization, dyadic/cone/cube partitions and the commutator
/// with constant λ.
std::vector<SelfCheck> identity_suite(int N, std::uint64_t seed = kDefaultSeed);

/// Runs the suite at N = 32 and N = 4; prints one line per check and returns
/// nonzero if any failed.
int selftest(std::ostream& out);

}  // namespace bipdo
