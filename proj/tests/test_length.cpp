#include <doctest.h>

#include "rtcode/length.hpp"
#include "rtcode/rng.hpp"

using namespace rtcode;

TEST_CASE("huffman expected length on known distributions") {
  CHECK(huffman_expected_length({0.5, 0.25, 0.25}).expected_length ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(huffman_expected_length({0.5, 0.5}).expected_length ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(huffman_expected_length({0.25, 0.25, 0.25, 0.25}).expected_length ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("degenerate distribution has zero expected length") {
  const auto lf = huffman_expected_length({0.0, 1.0, 0.0});
  CHECK(lf.expected_length == 0.0);
  CHECK(lf.lengths[1] == 0);
  CHECK(lf.lengths[0] == kInfiniteLength);
  CHECK(lf.lengths[2] == kInfiniteLength);
}

TEST_CASE("zero-probability symbols get the infinite sentinel") {
  const auto lf = huffman_expected_length({0.5, 0.0, 0.5});
  CHECK(lf.lengths[1] == kInfiniteLength);
  CHECK(lf.lengths[0] == 1);
  CHECK(lf.lengths[2] == 1);
}

TEST_CASE("huffman codes satisfy the kraft inequality") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.uniform_int(7);
    const auto lf = huffman_expected_length(rng.simplex(n));
    CHECK(kraft_check(lf.lengths));
  }
}

TEST_CASE("kraft check on explicit length sets") {
  CHECK(kraft_check({1, 2, 3, 3}));
  CHECK_FALSE(kraft_check({1, 1, 1}));
  CHECK(kraft_check({kInfiniteLength, 0, kInfiniteLength}));
  CHECK(kraft_check({2, 2, 2, 2}));
  CHECK_FALSE(kraft_check({1, 2, 2, 3}));
}

TEST_CASE("huffman matches the exhaustive oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + rng.uniform_int(4);
    Vec p = rng.simplex(n);
    CHECK(huffman_expected_length(p).expected_length ==
          doctest::Approx(oracle_min_expected_length(p)).epsilon(1e-12));
  }
}

TEST_CASE("conditional expected length averages per-state codes") {
  // Independent uniform z and y: one bit regardless of state.
  CHECK(conditional_expected_length({{0.25, 0.25}, {0.25, 0.25}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // State 0 carries a degenerate conditional, state 1 a fair bit.
  CHECK(conditional_expected_length({{0.5, 0.0}, {0.25, 0.25}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // Zero-mass states contribute nothing.
  CHECK(conditional_expected_length({{0.0, 0.0}, {0.5, 0.5}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("length validation errors") {
  CHECK_THROWS_AS(huffman_expected_length({0.5, 0.4}), SpecError);
  CHECK_THROWS_AS(huffman_expected_length({-0.5, 1.5}), SpecError);
  CHECK_THROWS_AS(conditional_expected_length({{0.9, 0.2}}), SpecError);
}
