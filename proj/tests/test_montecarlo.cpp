#include <doctest.h>

#include <cmath>

#include "rtcode/montecarlo.hpp"
#include "rtcode/search.hpp"
#include "support.hpp"

using namespace rtcode;
using namespace rtcode::testing;

TEST_CASE("deterministic source gives zero variance and the exact cost") {
  ProblemSpec spec = random_spec(3, 3, 1.0);
  spec.initial = {1.0, 0.0};
  spec.transitions.assign(2, {{1.0, 0.0}, {1.0, 0.0}});
  spec = validate_spec(std::move(spec));

  const DecoderPolicy dec = copy_decoder(spec);
  const TrackingEncoder enc = identity_encoder(spec, 2);
  const SimResult sim = simulate(spec, enc, dec, 500, 99);
  const double exact = evaluate_cost(spec, enc, dec).total;
  CHECK(sim.std_error == 0.0);
  CHECK(sim.mean_cost == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("zero lambda and zero distortion cost nothing") {
  ProblemSpec spec = random_spec(7, 2, 0.0);
  for (auto& table : spec.distortion)
    for (auto& row : table)
      for (auto& v : row) v = 0.0;
  const DecoderPolicy dec = copy_decoder(spec);
  const SimResult sim =
      simulate(spec, identity_encoder(spec, 2), dec, 200, 5);
  CHECK(sim.mean_cost == 0.0);
}

TEST_CASE("identical seeds reproduce bit-identical results") {
  const ProblemSpec spec = random_spec(11, 3, 0.8);
  Rng rng(11);
  const TrackingEncoder enc = sample_tracking(spec, 2, rng);
  const DecoderPolicy dec = sample_decoder(spec, 2, rng);
  const SimResult a = simulate(spec, enc, dec, 3000, 12345);
  const SimResult b = simulate(spec, enc, dec, 3000, 12345);
  CHECK(a.mean_cost == b.mean_cost);
  CHECK(a.std_error == b.std_error);
  CHECK(a.per_stage_means == b.per_stage_means);
  const SimResult c = simulate(spec, enc, dec, 3000, 54321);
  CHECK(a.mean_cost != c.mean_cost);
}

TEST_CASE("simulated mean tracks the exact evaluator") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ProblemSpec spec = random_spec(seed, 3, 0.9);
    Rng rng(seed + 100);
    const TrackingEncoder enc = sample_tracking(spec, 2, rng);
    const DecoderPolicy dec = sample_decoder(spec, 2, rng);
    const double exact = evaluate_cost(spec, enc, dec).total;
    const SimResult sim = simulate(spec, enc, dec, 20000, seed);
    CHECK(std::abs(sim.mean_cost - exact) <= 4.0 * sim.std_error + 1e-12);
  }
}

TEST_CASE("per-stage means average to the trajectory mean") {
  const ProblemSpec spec = random_spec(13, 3, 1.2);
  Rng rng(13);
  const TrackingEncoder enc = sample_tracking(spec, 2, rng);
  const DecoderPolicy dec = sample_decoder(spec, 2, rng);
  const SimResult sim = simulate(spec, enc, dec, 5000, 7);
  double total = 0.0;
  for (double v : sim.per_stage_means) total += v;
  CHECK(total / spec.horizon == doctest::Approx(sim.mean_cost).epsilon(1e-9));
}

TEST_CASE("doubling the trial count shrinks the standard error") {
  double ratio_sum = 0.0;
  const int instances = 5;
  for (int i = 0; i < instances; ++i) {
    const ProblemSpec spec = random_spec(200 + i, 3, 0.8);
    Rng rng(300 + i);
    const TrackingEncoder enc = sample_tracking(spec, 2, rng);
    const DecoderPolicy dec = sample_decoder(spec, 2, rng);
    const SimResult small = simulate(spec, enc, dec, 8000, 17);
    const SimResult big = simulate(spec, enc, dec, 16000, 18);
    REQUIRE(big.std_error > 0.0);
    ratio_sum += small.std_error / big.std_error;
  }
  const double mean_ratio = ratio_sum / instances;
  CHECK(mean_ratio >= 1.2);
  CHECK(mean_ratio <= 1.7);
}

TEST_CASE("si simulation matches the exact si evaluator") {
  const ProblemSpec spec = random_si_spec(19, 2, 0.6);
  Rng rng(19);
  const TrackingEncoder enc = sample_tracking(spec, 2, rng);
  const SiDecoderPolicy dec = sample_si_decoder(spec, 2, rng);
  const double exact = evaluate_cost_si(spec, enc, dec).total;
  const SimResult sim = simulate_si(spec, enc, dec, 20000, 23);
  CHECK(std::abs(sim.mean_cost - exact) <= 4.0 * sim.std_error + 1e-12);
}
