#include "rtcode/mdp.hpp"

#include <cmath>
#include <optional>

#include "rtcode/length.hpp"

namespace rtcode {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw SpecError(msg);
}

// Unnormalized Bayes minimum: min over xhat of sum_x weights[x] rho[x][xhat].
double weighted_envelope(const Vec& weights, const Mat& rho) {
  const int xhat_size = static_cast<int>(rho[0].size());
  double best = 0.0;
  for (int xhat = 0; xhat < xhat_size; ++xhat) {
    double v = 0.0;
    for (std::size_t x = 0; x < weights.size(); ++x)
      v += weights[x] * rho[x][xhat];
    if (xhat == 0 || v < best) best = v;
  }
  return best;
}

int belief_zw(const ProblemSpec& spec) {
  return spec.has_si() ? spec.zw_size : 1;
}

}  // namespace

BayesResponse bayes_response(const Vec& posterior, const Mat& rho) {
  check_probability_vector(posterior, "bayes_response posterior");
  BayesResponse out;
  const int xhat_size = static_cast<int>(rho[0].size());
  for (int xhat = 0; xhat < xhat_size; ++xhat) {
    double v = 0.0;
    for (std::size_t x = 0; x < posterior.size(); ++x)
      v += posterior[x] * rho[x][xhat];
    if (xhat == 0 || v < out.value) {
      out.xhat = xhat;
      out.value = v;
    }
  }
  return out;
}

Vec action_output_dist(const MdpState& state, const MdpAction& action,
                       int y_size, int zw_size) {
  Vec q(static_cast<std::size_t>(y_size), 0.0);
  const int x_size = static_cast<int>(action.map.size());
  for (int x = 0; x < x_size; ++x)
    for (int v = 0; v < zw_size; ++v)
      q[action.map[x]] += state.belief[x * zw_size + v];
  return q;
}

MdpState belief_update(const ProblemSpec& spec, const MdpState& state,
                       const MdpAction& action, int y) {
  require(!spec.has_si(), "belief_update: use belief_update_si for SI specs");
  require(state.stage >= 1 && state.stage < spec.horizon,
          "belief_update: no stage to update into");
  const Mat& tr = spec.transition_into(state.stage + 1);
  Vec next(static_cast<std::size_t>(spec.x_size), 0.0);
  double total = 0.0;
  for (int x = 0; x < spec.x_size; ++x) {
    if (action.map[x] != y) continue;
    const double mass = state.belief[x];
    if (mass <= 0.0) continue;
    total += mass;
    for (int x2 = 0; x2 < spec.x_size; ++x2) next[x2] += mass * tr[x][x2];
  }
  if (total <= 0.0)
    throw SpecError("belief_update: observation has probability 0");
  for (auto& v : next) v /= total;
  return {state.stage + 1, std::move(next)};
}

MdpState belief_update_si(const ProblemSpec& spec, const MdpState& state,
                          const MdpAction& action, int y,
                          const IntCube& si_next_stage) {
  require(spec.has_si(), "belief_update_si: spec has no SI");
  require(state.stage >= 1 && state.stage < spec.horizon,
          "belief_update_si: no stage to update into");
  const int zw = spec.zw_size;
  const Mat& tr = spec.transition_into(state.stage + 1);
  Vec next(static_cast<std::size_t>(spec.x_size * zw), 0.0);
  double total = 0.0;
  for (int x = 0; x < spec.x_size; ++x) {
    if (action.map[x] != y) continue;
    for (int v = 0; v < zw; ++v) {
      const double mass = state.belief[x * zw + v];
      if (mass <= 0.0) continue;
      total += mass;
      for (int w = 0; w < spec.w_size; ++w) {
        const int v2 = si_next_stage[w][y][v];
        const double m = mass * spec.si_channel[x][w];
        for (int x2 = 0; x2 < spec.x_size; ++x2)
          next[x2 * zw + v2] += m * tr[x][x2];
      }
    }
  }
  if (total <= 0.0)
    throw SpecError("belief_update_si: observation has probability 0");
  for (auto& v : next) v /= total;
  return {state.stage + 1, std::move(next)};
}

double stage_cost(const ProblemSpec& spec, const MdpState& state,
                  const MdpAction& action) {
  require(!spec.has_si(), "stage_cost: use stage_cost_si for SI specs");
  const Mat& rho = spec.rho(state.stage);
  const Vec q = action_output_dist(state, action, spec.y_size);
  double distortion = 0.0;
  for (int y = 0; y < spec.y_size; ++y) {
    if (q[y] <= 0.0) continue;
    Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
    for (int x = 0; x < spec.x_size; ++x)
      if (action.map[x] == y) weights[x] = state.belief[x];
    distortion += weighted_envelope(weights, rho);
  }
  return distortion +
         spec.lambda * huffman_expected_length(q).expected_length;
}

double stage_cost_si(const ProblemSpec& spec, const MdpState& state,
                     const MdpAction& action) {
  require(spec.has_si(), "stage_cost_si: spec has no SI");
  const int zw = spec.zw_size;
  const Mat& rho = spec.rho(state.stage);
  const Vec q = action_output_dist(state, action, spec.y_size, zw);
  double distortion = 0.0;
  for (int y = 0; y < spec.y_size; ++y) {
    if (q[y] <= 0.0) continue;
    // The decoder's reproduction sees (w, y, z^w); the length sees only y.
    for (int w = 0; w < spec.w_size; ++w)
      for (int v = 0; v < zw; ++v) {
        Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
        for (int x = 0; x < spec.x_size; ++x)
          if (action.map[x] == y)
            weights[x] = state.belief[x * zw + v] * spec.si_channel[x][w];
        distortion += weighted_envelope(weights, rho);
      }
  }
  return distortion +
         spec.lambda * huffman_expected_length(q).expected_length;
}

namespace {

int action_count(const ProblemSpec& spec) {
  long long count = 1;
  for (int x = 0; x < spec.x_size; ++x) {
    count *= spec.y_size;
    if (count > (1LL << 30))
      throw BudgetExceeded("action space exceeds enumeration limit");
  }
  return static_cast<int>(count);
}

// Actions in lexicographic order of the mapping; map[0] most significant.
MdpAction nth_action(const ProblemSpec& spec, int index) {
  MdpAction a;
  a.map.assign(static_cast<std::size_t>(spec.x_size), 0);
  for (int x = spec.x_size - 1; x >= 0; --x) {
    a.map[x] = index % spec.y_size;
    index /= spec.y_size;
  }
  return a;
}

struct Enumeration {
  ReachableSets sets;
  std::vector<BeliefInterner> interners;
};

Enumeration enumerate_impl(const ProblemSpec& spec,
                           const IntHyperCube* si_next_state,
                           std::uint64_t budget) {
  Enumeration e;
  const int T = spec.horizon;
  const int zw = belief_zw(spec);
  e.sets.per_stage.resize(static_cast<std::size_t>(T));
  e.interners.resize(static_cast<std::size_t>(T));

  Vec initial(static_cast<std::size_t>(spec.x_size * zw), 0.0);
  for (int x = 0; x < spec.x_size; ++x)
    initial[x * zw + 0] = spec.initial[x];
  e.interners[0].intern(initial);
  e.sets.per_stage[0].push_back({1, std::move(initial)});

  std::uint64_t total_states = 1;
  const int actions = action_count(spec);
  for (int t = 1; t < T; ++t) {
    for (const MdpState& s : e.sets.per_stage[t - 1])
      for (int ai = 0; ai < actions; ++ai) {
        const MdpAction a = nth_action(spec, ai);
        const Vec q = action_output_dist(s, a, spec.y_size, zw);
        for (int y = 0; y < spec.y_size; ++y) {
          if (q[y] <= 0.0) continue;
          MdpState next =
              si_next_state
                  ? belief_update_si(spec, s, a, y, (*si_next_state)[t - 1])
                  : belief_update(spec, s, a, y);
          const int id = e.interners[t].intern(next.belief);
          if (id == static_cast<int>(e.sets.per_stage[t].size())) {
            e.sets.per_stage[t].push_back(std::move(next));
            if (++total_states > budget)
              throw BudgetExceeded("reachable belief states exceed budget");
          }
        }
      }
  }

  // Near-collision diagnostic; skipped for very large stages to keep the
  // quadratic scan bounded.
  for (const auto& stage : e.sets.per_stage) {
    if (stage.size() > 4096) continue;
    for (std::size_t i = 0; i < stage.size(); ++i)
      for (std::size_t j = i + 1; j < stage.size(); ++j) {
        double gap = 0.0;
        for (std::size_t k = 0; k < stage[i].belief.size(); ++k)
          gap = std::max(gap,
                         std::abs(stage[i].belief[k] - stage[j].belief[k]));
        if (gap < 1e-6) ++e.sets.near_collisions;
      }
  }
  return e;
}

ValueTable solve_impl(const ProblemSpec& spec, const IntHyperCube* si_next_state,
                      std::uint64_t budget) {
  Enumeration e = enumerate_impl(spec, si_next_state, budget);
  const int T = spec.horizon;
  const int zw = belief_zw(spec);
  const int actions = action_count(spec);

  ValueTable table;
  table.per_stage.resize(static_cast<std::size_t>(T));
  std::vector<Vec> values(static_cast<std::size_t>(T));

  for (int t = T; t >= 1; --t) {
    const auto& states = e.sets.per_stage[t - 1];
    values[t - 1].assign(states.size(), 0.0);
    table.per_stage[t - 1].resize(states.size());
    for (std::size_t si = 0; si < states.size(); ++si) {
      const MdpState& s = states[si];
      double best = 0.0;
      int best_action = -1;
      for (int ai = 0; ai < actions; ++ai) {
        const MdpAction a = nth_action(spec, ai);
        double v = si_next_state ? stage_cost_si(spec, s, a)
                                 : stage_cost(spec, s, a);
        if (t < T) {
          const Vec q = action_output_dist(s, a, spec.y_size, zw);
          for (int y = 0; y < spec.y_size; ++y) {
            if (q[y] <= 0.0) continue;
            MdpState next = si_next_state
                                ? belief_update_si(spec, s, a, y,
                                                   (*si_next_state)[t - 1])
                                : belief_update(spec, s, a, y);
            const int id = e.interners[t].intern(next.belief);
            require(id < static_cast<int>(values[t].size()),
                    "backward pass reached an unenumerated state");
            v += q[y] * values[t][id];
          }
        }
        if (best_action < 0 || v < best) {
          best = v;
          best_action = ai;
        }
      }
      values[t - 1][si] = best;
      table.per_stage[t - 1][si] = {s, best, nth_action(spec, best_action)};
    }
  }
  table.optimal_cost = values[0][0] / T;
  return table;
}

InfiniteTrackingEncoder extract_impl(const ProblemSpec& spec,
                                     const ValueTable& table,
                                     const IntHyperCube* si_next_state) {
  const int T = spec.horizon;
  const int zw = belief_zw(spec);
  InfiniteTrackingEncoder enc;
  enc.horizon = T;
  enc.y_size = spec.y_size;
  enc.table.resize(static_cast<std::size_t>(T));

  // Rebuild per-stage lookup of the solved states.
  std::vector<BeliefInterner> interners(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    for (const ValueEntry& entry : table.per_stage[t])
      interners[t].intern(entry.state.belief);

  Vec initial(static_cast<std::size_t>(spec.x_size * zw), 0.0);
  for (int x = 0; x < spec.x_size; ++x)
    initial[x * zw + 0] = spec.initial[x];
  std::vector<std::optional<MdpState>> beliefs{MdpState{1, initial}};

  for (int t = 1; t <= T; ++t) {
    const int prefixes = static_cast<int>(beliefs.size());
    enc.table[t - 1].assign(
        static_cast<std::size_t>(prefixes),
        std::vector<int>(static_cast<std::size_t>(spec.x_size), 0));
    std::vector<std::optional<MdpState>> next(
        static_cast<std::size_t>(prefixes * spec.y_size));
    for (int p = 0; p < prefixes; ++p) {
      if (!beliefs[p]) continue;
      const MdpState& s = *beliefs[p];
      const int id = interners[t - 1].intern(s.belief);
      require(id < static_cast<int>(table.per_stage[t - 1].size()),
              "policy extraction reached an unsolved state");
      const MdpAction& a = table.per_stage[t - 1][id].action;
      for (int x = 0; x < spec.x_size; ++x)
        enc.table[t - 1][p][x] = a.map[x];
      if (t == T) continue;
      const Vec q = action_output_dist(s, a, spec.y_size, zw);
      for (int y = 0; y < spec.y_size; ++y) {
        if (q[y] <= 0.0) continue;
        next[p * spec.y_size + y] =
            si_next_state
                ? belief_update_si(spec, s, a, y, (*si_next_state)[t - 1])
                : belief_update(spec, s, a, y);
      }
    }
    if (t < T) beliefs = std::move(next);
  }
  return enc;
}

}  // namespace

ReachableSets enumerate_reachable(const ProblemSpec& spec,
                                  std::uint64_t budget) {
  require(!spec.has_si(), "enumerate_reachable: SI spec");
  return enumerate_impl(spec, nullptr, budget).sets;
}

ReachableSets enumerate_reachable_si(const ProblemSpec& spec,
                                     const IntHyperCube& si_next_state,
                                     std::uint64_t budget) {
  require(spec.has_si(), "enumerate_reachable_si: spec has no SI");
  return enumerate_impl(spec, &si_next_state, budget).sets;
}

ValueTable solve_backward(const ProblemSpec& spec, std::uint64_t budget) {
  require(!spec.has_si(), "solve_backward: use solve_backward_si");
  return solve_impl(spec, nullptr, budget);
}

ValueTable solve_backward_si(const ProblemSpec& spec,
                             const IntHyperCube& si_next_state,
                             std::uint64_t budget) {
  require(spec.has_si(), "solve_backward_si: spec has no SI");
  return solve_impl(spec, &si_next_state, budget);
}

InfiniteTrackingEncoder extract_encoder(const ProblemSpec& spec,
                                        const ValueTable& table) {
  require(!spec.has_si(), "extract_encoder: SI spec");
  return extract_impl(spec, table, nullptr);
}

InfiniteTrackingEncoder extract_encoder_si(const ProblemSpec& spec,
                                           const ValueTable& table,
                                           const IntHyperCube& si_next_state) {
  require(spec.has_si(), "extract_encoder_si: spec has no SI");
  return extract_impl(spec, table, &si_next_state);
}

nlohmann::json value_table_to_json(const ValueTable& table) {
  nlohmann::json doc;
  doc["optimal_cost"] = table.optimal_cost;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& stage : table.per_stage) {
    nlohmann::json entries = nlohmann::json::array();
    for (const ValueEntry& entry : stage)
      entries.push_back({{"stage", entry.state.stage},
                         {"belief", entry.state.belief},
                         {"cost_to_go", entry.cost_to_go},
                         {"action", entry.action.map}});
    stages.push_back(std::move(entries));
  }
  doc["stages"] = std::move(stages);
  return doc;
}

}  // namespace rtcode
