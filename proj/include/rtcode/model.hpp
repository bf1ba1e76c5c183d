#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rtcode/common.hpp"

namespace rtcode {

// A full problem instance: Markov source, index set, decoder state
// alphabets, distortion schedule, rate-distortion tradeoff and (optionally)
// a memoryless side-information channel. Immutable after validation.
struct ProblemSpec {
  int x_size = 0;     // source alphabet
  int y_size = 0;     // index set transmitted to the decoder
  int zy_size = 0;    // decoder state alphabet (SI-independent sub-state)
  int zw_size = 0;    // SI-driven sub-state alphabet; 0 when SI is absent
  int w_size = 0;     // side-information alphabet; 0 when SI is absent
  int xhat_size = 0;  // reproduction alphabet
  int horizon = 0;    // number of stages T
  double lambda = 0.0;

  Vec initial;                   // P(x_1)
  std::vector<Mat> transitions;  // [t][x_prev][x], one per stage t=2..T
  std::vector<Mat> distortion;   // [t][x][xhat], one per stage t=1..T
  Mat si_channel;                // [x][w]; empty when SI is absent

  bool has_si() const { return w_size > 0; }
  // Transition matrix taking stage t to t+1 (t is 1-based).
  const Mat& transition_into(int t_next) const {
    return transitions[static_cast<std::size_t>(t_next) - 2];
  }
  const Mat& rho(int t) const {
    return distortion[static_cast<std::size_t>(t) - 1];
  }
};

// Checks every invariant (stochastic rows, nonnegative finite distortion,
// lambda >= 0, strictly positive SI channel) and returns the spec
// unchanged. Throws SpecError naming the violated field.
ProblemSpec validate_spec(ProblemSpec spec);

// Lifts a k-order Markov source over X to an equivalent first-order spec
// over X^k. The k-order kernel rows are indexed by the history tuple
// (x_{t-k},...,x_{t-1}) encoded base x_size, oldest coordinate most
// significant; history positions before stage 1 are padded with symbol 0.
// Distortion (and the SI channel, if present) read the newest coordinate.
// korder_transitions holds one kernel per stage t=2..T, or a single kernel
// broadcast to all stages.
ProblemSpec lift_korder(const ProblemSpec& spec, int k,
                        const std::vector<Mat>& korder_transitions);

// Exact source marginal P(x_t), t 1-based.
Vec source_marginal(const ProblemSpec& spec, int t);

// JSON document interface. Top-level keys: "x_size", "y_size", "zy_size",
// "zw_size", "w_size", "xhat_size", "horizon", "lambda", "initial",
// "transitions" (matrix or list of matrices), "distortion" (table or list
// of tables), optional "si_channel".
ProblemSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const ProblemSpec& spec);
ProblemSpec load_spec(const std::string& path);

}  // namespace rtcode
