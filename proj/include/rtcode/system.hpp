#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "rtcode/model.hpp"

namespace rtcode {

using IntCube = std::vector<std::vector<std::vector<int>>>;
using IntHyperCube = std::vector<IntCube>;

// Deterministic tracking encoder: table[t][x][z] -> y.
struct TrackingEncoder {
  IntCube table;
};

// Stochastic tracking encoder: prob[t][x][z][y] = P(y | x, z).
struct StochasticEncoder {
  std::vector<std::vector<std::vector<Vec>>> prob;
};

// Deterministic full-history encoder. Keys are realized prefixes
// (x_1..x_t, y_1..y_{t-1}); the stage is recovered from the key length.
struct FullHistoryEncoder {
  int horizon = 0;
  std::map<std::vector<int>, int> table;
};

// Tracking encoder for the infinite-memory decoder: table[t][p][x] -> y
// where p encodes the output prefix y^{t} base y_size (empty prefix = 0).
struct InfiniteTrackingEncoder {
  int horizon = 0;
  int y_size = 0;
  IntCube table;
};

// Finite-state decoder without SI: next_state[t][y][z] -> z',
// reproduction[t][y][z] -> xhat. The decoder starts in state 0 at a
// virtual stage 0, so r_1(y) is next_state[0][y][0].
struct DecoderPolicy {
  IntCube next_state;
  IntCube reproduction;
};

// Decoder with side information. reproduction[t][w][y][zw][zy] -> xhat;
// si_next_state[t][w][y][zw] -> zw'. Both sub-states start at index 0.
struct SiDecoderPolicy {
  IntCube next_state;  // [t][y][zy] -> zy'
  std::vector<IntHyperCube> reproduction;
  IntHyperCube si_next_state;
};

struct StageCost {
  double distortion = 0.0;
  double length = 0.0;
  double cost = 0.0;  // distortion + lambda * length
};

struct CostReport {
  std::vector<StageCost> per_stage;
  double total = 0.0;           // (1/T) sum of per-stage costs
  double avg_distortion = 0.0;  // (1/T) sum of distortion terms
  double avg_length = 0.0;      // (1/T) sum of length terms
};

// Exact joint probability over (x_t, z_{t-1}) at a stage.
struct JointState {
  int stage = 0;
  Mat table;  // [x][zy]
};

// SI variant, over (x_t, z^y_{t-1}, z^w_{t-1}).
struct JointStateSi {
  int stage = 0;
  std::vector<Mat> table;  // [x][zy][zw]
};

StochasticEncoder to_stochastic(const TrackingEncoder& enc, int y_size);

std::vector<JointState> propagate_joint(const ProblemSpec& spec,
                                        const StochasticEncoder& enc,
                                        const DecoderPolicy& dec);
std::vector<JointStateSi> propagate_joint_si(const ProblemSpec& spec,
                                             const StochasticEncoder& enc,
                                             const SiDecoderPolicy& dec);

CostReport evaluate_cost(const ProblemSpec& spec, const StochasticEncoder& enc,
                         const DecoderPolicy& dec);
CostReport evaluate_cost(const ProblemSpec& spec, const TrackingEncoder& enc,
                         const DecoderPolicy& dec);
CostReport evaluate_cost(const ProblemSpec& spec,
                         const FullHistoryEncoder& enc,
                         const DecoderPolicy& dec,
                         std::uint64_t history_budget = 1000000);

CostReport evaluate_cost_si(const ProblemSpec& spec,
                            const StochasticEncoder& enc,
                            const SiDecoderPolicy& dec);
CostReport evaluate_cost_si(const ProblemSpec& spec,
                            const TrackingEncoder& enc,
                            const SiDecoderPolicy& dec);

// Stage-wise conditional P(y | x^t, y^{t-1}) for history-dependent
// (possibly stochastic) encoders; t is 1-based, xs holds x_1..x_t and ys
// holds y_1..y_{t-1}.
using HistoryEncoderFn = std::function<Vec(
    int t, std::span<const int> xs, std::span<const int> ys)>;

CostReport evaluate_cost_history(const ProblemSpec& spec,
                                 const HistoryEncoderFn& enc,
                                 const DecoderPolicy& dec,
                                 std::uint64_t history_budget = 1000000);
CostReport evaluate_cost_si_history(const ProblemSpec& spec,
                                    const HistoryEncoderFn& enc,
                                    const SiDecoderPolicy& dec,
                                    std::uint64_t history_budget = 1000000);

// Tracking search on the infinite-memory decoder (z = y-prefix) with the
// Bayes-optimal reproduction implied.
CostReport evaluate_infinite_memory(const ProblemSpec& spec,
                                    const InfiniteTrackingEncoder& enc);
CostReport evaluate_infinite_memory_si(const ProblemSpec& spec,
                                       const InfiniteTrackingEncoder& enc,
                                       const IntHyperCube& si_next_state);

// Expected distortion at stage t given the encoder's belief over the
// decoder's SI sub-state: sum over (w, zw) of P(w|x) b(zw)
// rho_t(x, g_t(w, y, zw, zy)).
double modified_distortion(const ProblemSpec& spec, const Vec& belief, int t,
                           int x, int y, int zy, const SiDecoderPolicy& dec);

// One step of the encoder's belief recursion over the decoder's SI
// sub-state. si_next_stage is the stage-t slice [w][y][zw] -> zw'.
Vec encoder_belief_update(const ProblemSpec& spec, const Vec& belief, int x,
                          int y, const IntCube& si_next_stage);

// Bayes-optimal reproduction tables for a fixed encoder and next-state
// functions. Unreachable cells are filled with index 0; minimum ties break
// toward the smallest reproduction index.
DecoderPolicy bayes_decoder(const ProblemSpec& spec,
                            const StochasticEncoder& enc,
                            const IntCube& next_state);
DecoderPolicy bayes_decoder(const ProblemSpec& spec,
                            const TrackingEncoder& enc,
                            const IntCube& next_state);
SiDecoderPolicy bayes_decoder_si(const ProblemSpec& spec,
                                 const StochasticEncoder& enc,
                                 const IntCube& next_state,
                                 const IntHyperCube& si_next_state);
SiDecoderPolicy bayes_decoder_si(const ProblemSpec& spec,
                                 const TrackingEncoder& enc,
                                 const IntCube& next_state,
                                 const IntHyperCube& si_next_state);

// Deduplicates probability vectors by rounding coordinates before keying.
class BeliefInterner {
 public:
  explicit BeliefInterner(double resolution = 1e-9)
      : resolution_(resolution) {}
  int intern(const Vec& belief);
  const Vec& at(int id) const { return beliefs_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(beliefs_.size()); }

 private:
  double resolution_;
  std::map<std::vector<long long>, int> ids_;
  std::vector<Vec> beliefs_;
};

// Policy (de)serialization; round-trips exactly. Tables are stage-major,
// then row-major.
nlohmann::json encoder_to_json(const TrackingEncoder& enc);
nlohmann::json encoder_to_json(const StochasticEncoder& enc);
nlohmann::json encoder_to_json(const FullHistoryEncoder& enc);
nlohmann::json encoder_to_json(const InfiniteTrackingEncoder& enc);
TrackingEncoder tracking_encoder_from_json(const nlohmann::json& doc);
StochasticEncoder stochastic_encoder_from_json(const nlohmann::json& doc);
FullHistoryEncoder full_history_encoder_from_json(const nlohmann::json& doc);
InfiniteTrackingEncoder infinite_encoder_from_json(const nlohmann::json& doc);
nlohmann::json decoder_to_json(const DecoderPolicy& dec);
nlohmann::json decoder_to_json(const SiDecoderPolicy& dec);
DecoderPolicy decoder_from_json(const nlohmann::json& doc);
SiDecoderPolicy si_decoder_from_json(const nlohmann::json& doc);

}  // namespace rtcode
