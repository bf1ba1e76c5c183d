#pragma once

#include <cstdint>

#include "rtcode/system.hpp"

namespace rtcode {

struct BayesResponse {
  int xhat = 0;
  double value = 0.0;
};

// argmin over xhat of sum_x posterior(x) rho(x, xhat); ties toward the
// smallest reproduction index.
BayesResponse bayes_response(const Vec& posterior, const Mat& rho);

// Encoder action a_t : X -> Y.
struct MdpAction {
  std::vector<int> map;
};

// Belief state. Without SI the belief is P(x_t | y^{t-1}); with SI it is
// P(x_t, z^w_{t-1} | y^{t-1}) flattened as belief[x * zw_size + zw].
struct MdpState {
  int stage = 0;  // 1-based
  Vec belief;
};

// Output distribution P(y) induced by (state, action).
Vec action_output_dist(const MdpState& state, const MdpAction& action,
                       int y_size, int zw_size = 1);

// Posterior push-forward after observing y; throws SpecError when the pair
// assigns probability 0 to y (unreachable branch).
MdpState belief_update(const ProblemSpec& spec, const MdpState& state,
                       const MdpAction& action, int y);
// SI version; si_next_stage is the stage-t slice [w][y][zw] -> zw'.
MdpState belief_update_si(const ProblemSpec& spec, const MdpState& state,
                          const MdpAction& action, int y,
                          const IntCube& si_next_stage);

// One-stage Lagrangian cost gamma_t(s, a): Bayes-envelope distortion plus
// lambda times the Huffman expected length of the induced P(y).
double stage_cost(const ProblemSpec& spec, const MdpState& state,
                  const MdpAction& action);
double stage_cost_si(const ProblemSpec& spec, const MdpState& state,
                     const MdpAction& action);

struct ReachableSets {
  std::vector<std::vector<MdpState>> per_stage;  // index 0 = stage 1
  // Pairs of distinct interned states within 1e-6 of each other; nonzero
  // counts flag instances where the 1e-9 interning is fragile.
  std::uint64_t near_collisions = 0;
};

ReachableSets enumerate_reachable(const ProblemSpec& spec,
                                  std::uint64_t budget = 10000000);
ReachableSets enumerate_reachable_si(const ProblemSpec& spec,
                                     const IntHyperCube& si_next_state,
                                     std::uint64_t budget = 10000000);

struct ValueEntry {
  MdpState state;
  double cost_to_go = 0.0;
  MdpAction action;
};

struct ValueTable {
  std::vector<std::vector<ValueEntry>> per_stage;
  double optimal_cost = 0.0;  // u_1*(initial) / T
};

ValueTable solve_backward(const ProblemSpec& spec,
                          std::uint64_t budget = 10000000);
ValueTable solve_backward_si(const ProblemSpec& spec,
                             const IntHyperCube& si_next_state,
                             std::uint64_t budget = 10000000);

// Unrolls the solved policy onto the infinite-memory decoder's prefix tree
// (prefix p at stage t encodes y^{t-1} base y_size). Unreachable prefixes
// emit symbol 0.
InfiniteTrackingEncoder extract_encoder(const ProblemSpec& spec,
                                        const ValueTable& table);
InfiniteTrackingEncoder extract_encoder_si(const ProblemSpec& spec,
                                           const ValueTable& table,
                                           const IntHyperCube& si_next_state);

nlohmann::json value_table_to_json(const ValueTable& table);

}  // namespace rtcode
