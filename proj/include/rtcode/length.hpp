#pragma once

#include <vector>

#include "rtcode/common.hpp"

namespace rtcode {

// Sentinel for symbols outside the code's support (zero probability).
inline constexpr int kInfiniteLength = -1;

// Integer codeword lengths in bits over an index alphabet, plus the
// expected length under the distribution the code was built for. A length
// of 0 appears only in the degenerate case (one symbol carries all mass,
// nothing needs to be transmitted).
struct LengthFunction {
  std::vector<int> lengths;
  double expected_length = 0.0;
};

// Optimal expected codeword length for `dist`. Degenerate distributions
// get expected length 0; otherwise lengths are Huffman-optimal over the
// support with deterministic tie-breaking (smallest weight first, weight
// ties broken by the smallest contained symbol index).
LengthFunction huffman_expected_length(const Vec& dist);

// Sum over conditioning states z of P(z) times the optimal expected length
// of P(y|z). joint_zy[z][y] = P(Y=y, Z=z); states with P(z)=0 contribute 0.
double conditional_expected_length(const Mat& joint_zy);

// Exact minimum of sum P(y) l(y) over all integer length assignments on
// the support (lengths in 1..n) satisfying Kraft's inequality. Brute
// force; support size must be <= 8. Returns 0 for degenerate inputs.
double oracle_min_expected_length(const Vec& dist);

// True iff sum of 2^-l over finite entries is <= 1. Entries must be
// nonnegative integers or kInfiniteLength.
bool kraft_check(const std::vector<int>& lengths);

}  // namespace rtcode
