#pragma once

#include "dimkit/combinatorics.hpp"
#include "dimkit/psi.hpp"
#include "dimkit/rational.hpp"
#include "dimkit/witness.hpp"

namespace dimkit {

/// Smallest k_B >= 1 with k_B^(k_N+1) q^(2(k_N+1)) < 2^k_B.
std::size_t min_kb(std::size_t k_N, std::size_t q);

/// d / (log2 d + 2 log2 q) <= k_N + 1 at the witness order d = min_kb - 1,
/// checked in the integer form 2^d <= (d q^2)^(k_N+1).
struct CountingInequality {
  std::size_t k_N = 0;
  std::size_t q = 0;
  std::size_t k_B = 0;
  std::size_t order = 0;
  BigInt lhs;  // 2^order
  BigInt rhs;  // (order q^2)^(k_N+1)
  bool holds = false;
};

CountingInequality counting_inequality(std::size_t k_N, std::size_t q);

/// Psi witness of order min_kb(k_N, q) - 1 built from a Natarajan witness of
/// order k_N: on (T, psi-bar) it returns the lexicographically first binary
/// pattern outside psi-bar(v(T)), where v(T) are the good-function behaviors.
/// Throws InternalConsistency if |v(T)| exceeds k_B^(k_N+1) q^(2(k_N+1)).
Witness psi_witness_from_natarajan(const Witness& natarajan, const PsiFamily& family, SearchOptions options = {});

}  // namespace dimkit
