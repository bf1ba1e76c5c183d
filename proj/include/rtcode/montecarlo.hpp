#pragma once

#include <cstdint>

#include "rtcode/system.hpp"

namespace rtcode {

struct SimResult {
  std::uint64_t n = 0;
  double mean_cost = 0.0;       // empirical average of per-trajectory costs
  double std_error = 0.0;       // sample standard deviation / sqrt(n)
  Vec per_stage_means;          // empirical per-stage Lagrangian costs
};

// Samples n independent trajectories through the encoder/decoder state
// machines. The length charged for a realized symbol is its exact Huffman
// length under the induced conditional P(y_t | z_{t-1}), so sampling noise
// enters only through the trajectory expectation. Deterministic per seed.
SimResult simulate(const ProblemSpec& spec, const StochasticEncoder& enc,
                   const DecoderPolicy& dec, std::uint64_t n,
                   std::uint64_t seed);
SimResult simulate(const ProblemSpec& spec, const TrackingEncoder& enc,
                   const DecoderPolicy& dec, std::uint64_t n,
                   std::uint64_t seed);
SimResult simulate_si(const ProblemSpec& spec, const StochasticEncoder& enc,
                      const SiDecoderPolicy& dec, std::uint64_t n,
                      std::uint64_t seed);
SimResult simulate_si(const ProblemSpec& spec, const TrackingEncoder& enc,
                      const SiDecoderPolicy& dec, std::uint64_t n,
                      std::uint64_t seed);

nlohmann::json sim_result_to_json(const SimResult& result);

}  // namespace rtcode
