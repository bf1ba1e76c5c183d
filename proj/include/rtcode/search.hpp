#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rtcode/rng.hpp"
#include "rtcode/system.hpp"

namespace rtcode {

struct SearchOptions {
  std::uint64_t budget = 10000000;  // max candidates / DP expansions
  int threads = 1;
};

struct SearchResult {
  double best_cost = 0.0;
  CostReport report;
  std::uint64_t candidates_evaluated = 0;
  std::optional<TrackingEncoder> tracking;
  std::optional<FullHistoryEncoder> full_history;
  std::optional<InfiniteTrackingEncoder> infinite;
  std::optional<DecoderPolicy> decoder;
};

struct TheoremReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool holds = false;
  std::string note;
  nlohmann::json details;
};

struct ConcavityReport {
  std::uint64_t trials = 0;
  std::uint64_t stage_violations = 0;
  std::uint64_t future_violations = 0;
  double worst_slack = 0.0;  // most negative concavity gap observed
};

// Exact minimum over deterministic per-stage tables y = f_t(x, z) for a
// fixed decoder. Ties break toward the lexicographically smallest table.
SearchResult optimize_tracking(const ProblemSpec& spec,
                               const DecoderPolicy& dec,
                               const SearchOptions& opts = {});

// Exact minimum over deterministic full-history encoders. Deterministic
// prefixes make y^{t-1} a function of x^{t-1}, so assignments are
// enumerated on the x-prefix tree; the returned encoder is keyed by the
// realized (x^t, y^{t-1}) prefixes.
SearchResult optimize_full_history(const ProblemSpec& spec,
                                   const DecoderPolicy& dec,
                                   const SearchOptions& opts = {});

// Exact minimum over tracking encoders driving the infinite-memory decoder
// (state = the full y-prefix) with Bayes-optimal reproduction.
SearchResult optimize_tracking_infinite(const ProblemSpec& spec,
                                        const SearchOptions& opts = {});

// Exact minimum over next-state tables and tracking encoders with a
// zy_size-state decoder and Bayes reproduction. Implemented as dynamic
// programming over the design state P(x_t, z_{t-1}), which evolves
// deterministically in the tables, with memoized subproblems.
SearchResult optimize_system(const ProblemSpec& spec, int zy_size,
                             const SearchOptions& opts = {});

// Exact minimum when the decoder state is the sliding window of the last l
// outputs (padded with a null symbol before stage l); the next-state
// function is the fixed shift map, so only encoders are searched.
// Requires l >= 1 and l dividing the horizon.
SearchResult optimize_sliding_window(const ProblemSpec& spec, int l,
                                     const SearchOptions& opts = {});

// lhs = full-history optimum, rhs = tracking optimum; holds iff
// |lhs - rhs| <= 1e-9 and none of `samples` random stochastic tracking
// encoders beats rhs by more than 1e-9. The sampled part is evidence, not
// proof, and the note says so.
TheoremReport check_theorem1(const ProblemSpec& spec, const DecoderPolicy& dec,
                             int samples, std::uint64_t seed,
                             const SearchOptions& opts = {});

// lhs = best zy_size-state cost, rhs = best window-l cost minus
// lambda * log2(zy_size) / l; holds iff slack >= -1e-9.
TheoremReport check_theorem3(const ProblemSpec& spec, int zy_size, int l,
                             const SearchOptions& opts = {});

// lhs = unconstrained full-history optimum under SI; rhs = optimum over
// encoders constant on histories sharing (encoder belief, x_t, z^y);
// holds iff |lhs - rhs| <= 1e-9.
TheoremReport check_theorem6(const ProblemSpec& spec,
                             const SiDecoderPolicy& dec,
                             const SearchOptions& opts = {});

// Draws stochastic encoder pairs at `stage` and a uniform mixing weight,
// then checks concavity of the same-stage cost and of the downstream cost
// sum in the stage-`stage` encoder.
ConcavityReport sample_concavity(const ProblemSpec& spec,
                                 const DecoderPolicy& dec, int stage,
                                 std::uint64_t trials, std::uint64_t seed);

TrackingEncoder sample_tracking(const ProblemSpec& spec, int zy, Rng& rng);
StochasticEncoder sample_stochastic_tracking(const ProblemSpec& spec, int zy,
                                             Rng& rng);
DecoderPolicy sample_decoder(const ProblemSpec& spec, int zy, Rng& rng);
SiDecoderPolicy sample_si_decoder(const ProblemSpec& spec, int zy, Rng& rng);

nlohmann::json search_result_to_json(const SearchResult& result);
nlohmann::json theorem_report_to_json(const TheoremReport& report);

}  // namespace rtcode
