#include "rtcode/system.hpp"

#include <cmath>

#include "rtcode/length.hpp"

namespace rtcode {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw SpecError(msg);
}

// argmin over xhat of sum_x weights[x] * rho[x][xhat]; weights need not be
// normalized. Ties break toward the smallest reproduction index.
std::pair<int, double> weighted_bayes(const Vec& weights, const Mat& rho) {
  const int xhat_size = static_cast<int>(rho[0].size());
  int best = 0;
  double best_value = 0.0;
  for (int xhat = 0; xhat < xhat_size; ++xhat) {
    double v = 0.0;
    for (std::size_t x = 0; x < weights.size(); ++x)
      v += weights[x] * rho[x][xhat];
    if (xhat == 0 || v < best_value) {
      best = xhat;
      best_value = v;
    }
  }
  return {best, best_value};
}

void check_encoder_dims(const ProblemSpec& spec, const StochasticEncoder& enc,
                        int zy) {
  require(static_cast<int>(enc.prob.size()) == spec.horizon,
          "encoder: wrong stage count");
  for (const auto& stage : enc.prob) {
    require(static_cast<int>(stage.size()) == spec.x_size,
            "encoder: wrong x dimension");
    for (const auto& per_x : stage) {
      require(static_cast<int>(per_x.size()) == zy,
              "encoder: wrong state dimension");
      for (const auto& row : per_x) {
        require(static_cast<int>(row.size()) == spec.y_size,
                "encoder: wrong y dimension");
        check_probability_vector(row, "encoder row");
      }
    }
  }
}

int decoder_state_size(const DecoderPolicy& dec) {
  require(!dec.next_state.empty() && !dec.next_state[0].empty(),
          "decoder: empty next_state");
  return static_cast<int>(dec.next_state[0][0].size());
}

CostReport finish_report(const ProblemSpec& spec, const Vec& distortion,
                         const std::vector<Mat>& joint_yz_per_stage) {
  CostReport report;
  const int T = spec.horizon;
  report.per_stage.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    StageCost& sc = report.per_stage[static_cast<std::size_t>(t)];
    sc.distortion = distortion[static_cast<std::size_t>(t)];
    sc.length = conditional_expected_length(
        joint_yz_per_stage[static_cast<std::size_t>(t)]);
    sc.cost = sc.distortion + spec.lambda * sc.length;
    report.total += sc.cost;
    report.avg_distortion += sc.distortion;
    report.avg_length += sc.length;
  }
  report.total /= T;
  report.avg_distortion /= T;
  report.avg_length /= T;
  return report;
}

}  // namespace

StochasticEncoder to_stochastic(const TrackingEncoder& enc, int y_size) {
  StochasticEncoder out;
  out.prob.resize(enc.table.size());
  for (std::size_t t = 0; t < enc.table.size(); ++t) {
    out.prob[t].resize(enc.table[t].size());
    for (std::size_t x = 0; x < enc.table[t].size(); ++x) {
      out.prob[t][x].resize(enc.table[t][x].size());
      for (std::size_t z = 0; z < enc.table[t][x].size(); ++z) {
        const int y = enc.table[t][x][z];
        require(y >= 0 && y < y_size, "tracking encoder: symbol out of range");
        Vec row(static_cast<std::size_t>(y_size), 0.0);
        row[static_cast<std::size_t>(y)] = 1.0;
        out.prob[t][x][z] = std::move(row);
      }
    }
  }
  return out;
}

std::vector<JointState> propagate_joint(const ProblemSpec& spec,
                                        const StochasticEncoder& enc,
                                        const DecoderPolicy& dec) {
  const int zy = decoder_state_size(dec);
  check_encoder_dims(spec, enc, zy);
  require(static_cast<int>(dec.next_state.size()) == spec.horizon,
          "decoder: wrong stage count");

  std::vector<JointState> states;
  states.reserve(static_cast<std::size_t>(spec.horizon));
  Mat cur(static_cast<std::size_t>(spec.x_size),
          Vec(static_cast<std::size_t>(zy), 0.0));
  for (int x = 0; x < spec.x_size; ++x) cur[x][0] = spec.initial[x];
  states.push_back({1, cur});

  for (int t = 1; t < spec.horizon; ++t) {
    Mat next(static_cast<std::size_t>(spec.x_size),
             Vec(static_cast<std::size_t>(zy), 0.0));
    const Mat& tr = spec.transition_into(t + 1);
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z) {
        const double mass = cur[x][z];
        if (mass <= 0.0) continue;
        for (int y = 0; y < spec.y_size; ++y) {
          const double py = enc.prob[t - 1][x][z][y];
          if (py <= 0.0) continue;
          const int z2 = dec.next_state[t - 1][y][z];
          for (int x2 = 0; x2 < spec.x_size; ++x2)
            next[x2][z2] += mass * py * tr[x][x2];
        }
      }
    cur = std::move(next);
    states.push_back({t + 1, cur});
  }
  return states;
}

std::vector<JointStateSi> propagate_joint_si(const ProblemSpec& spec,
                                             const StochasticEncoder& enc,
                                             const SiDecoderPolicy& dec) {
  require(spec.has_si(), "propagate_joint_si: spec has no side information");
  const int zy = static_cast<int>(dec.next_state[0][0].size());
  const int zw = spec.zw_size;
  check_encoder_dims(spec, enc, zy);

  auto zero = [&] {
    return std::vector<Mat>(
        static_cast<std::size_t>(spec.x_size),
        Mat(static_cast<std::size_t>(zy),
            Vec(static_cast<std::size_t>(zw), 0.0)));
  };

  std::vector<JointStateSi> states;
  auto cur = zero();
  for (int x = 0; x < spec.x_size; ++x) cur[x][0][0] = spec.initial[x];
  states.push_back({1, cur});

  for (int t = 1; t < spec.horizon; ++t) {
    auto next = zero();
    const Mat& tr = spec.transition_into(t + 1);
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z)
        for (int v = 0; v < zw; ++v) {
          const double mass = cur[x][z][v];
          if (mass <= 0.0) continue;
          for (int y = 0; y < spec.y_size; ++y) {
            const double py = enc.prob[t - 1][x][z][y];
            if (py <= 0.0) continue;
            const int z2 = dec.next_state[t - 1][y][z];
            for (int w = 0; w < spec.w_size; ++w) {
              const int v2 = dec.si_next_state[t - 1][w][y][v];
              const double m = mass * py * spec.si_channel[x][w];
              for (int x2 = 0; x2 < spec.x_size; ++x2)
                next[x2][z2][v2] += m * tr[x][x2];
            }
          }
        }
    cur = std::move(next);
    states.push_back({t + 1, cur});
  }
  return states;
}

CostReport evaluate_cost(const ProblemSpec& spec, const StochasticEncoder& enc,
                         const DecoderPolicy& dec) {
  require(!spec.has_si(), "evaluate_cost: use evaluate_cost_si for SI specs");
  const int zy = decoder_state_size(dec);
  const auto joints = propagate_joint(spec, enc, dec);

  Vec distortion(static_cast<std::size_t>(spec.horizon), 0.0);
  std::vector<Mat> joint_yz(static_cast<std::size_t>(spec.horizon));
  for (int t = 0; t < spec.horizon; ++t) {
    const Mat& rho = spec.rho(t + 1);
    Mat q(static_cast<std::size_t>(zy),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z) {
        const double mass = joints[t].table[x][z];
        if (mass <= 0.0) continue;
        for (int y = 0; y < spec.y_size; ++y) {
          const double p = mass * enc.prob[t][x][z][y];
          if (p <= 0.0) continue;
          q[z][y] += p;
          distortion[t] += p * rho[x][dec.reproduction[t][y][z]];
        }
      }
    joint_yz[t] = std::move(q);
  }
  return finish_report(spec, distortion, joint_yz);
}

CostReport evaluate_cost(const ProblemSpec& spec, const TrackingEncoder& enc,
                         const DecoderPolicy& dec) {
  return evaluate_cost(spec, to_stochastic(enc, spec.y_size), dec);
}

CostReport evaluate_cost_si(const ProblemSpec& spec,
                            const StochasticEncoder& enc,
                            const SiDecoderPolicy& dec) {
  require(spec.has_si(), "evaluate_cost_si: spec has no side information");
  const int zy = static_cast<int>(dec.next_state[0][0].size());
  const auto joints = propagate_joint_si(spec, enc, dec);

  Vec distortion(static_cast<std::size_t>(spec.horizon), 0.0);
  std::vector<Mat> joint_yz(static_cast<std::size_t>(spec.horizon));
  for (int t = 0; t < spec.horizon; ++t) {
    const Mat& rho = spec.rho(t + 1);
    Mat q(static_cast<std::size_t>(zy),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z)
        for (int v = 0; v < spec.zw_size; ++v) {
          const double mass = joints[t].table[x][z][v];
          if (mass <= 0.0) continue;
          for (int y = 0; y < spec.y_size; ++y) {
            const double p = mass * enc.prob[t][x][z][y];
            if (p <= 0.0) continue;
            q[z][y] += p;
            for (int w = 0; w < spec.w_size; ++w)
              distortion[t] += p * spec.si_channel[x][w] *
                               rho[x][dec.reproduction[t][w][y][v][z]];
          }
        }
    joint_yz[t] = std::move(q);
  }
  return finish_report(spec, distortion, joint_yz);
}

CostReport evaluate_cost_si(const ProblemSpec& spec,
                            const TrackingEncoder& enc,
                            const SiDecoderPolicy& dec) {
  return evaluate_cost_si(spec, to_stochastic(enc, spec.y_size), dec);
}

namespace {

struct HistoryWalk {
  const ProblemSpec& spec;
  const HistoryEncoderFn& enc;
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  Vec distortion;
  std::vector<Mat> joint_yz;
  std::vector<int> xs, ys;

  void tick() {
    if (++nodes > budget)
      throw BudgetExceeded("history expansion exceeds budget");
  }
};

void walk_history(HistoryWalk& c, const DecoderPolicy& dec, int t, double prob,
                  int z) {
  const ProblemSpec& spec = c.spec;
  for (int x = 0; x < spec.x_size; ++x) {
    const double px =
        prob * (t == 1 ? spec.initial[x]
                       : spec.transition_into(t)[c.xs.back()][x]);
    if (px <= 0.0) continue;
    c.xs.push_back(x);
    const Vec dist = c.enc(t, c.xs, c.ys);
    require(static_cast<int>(dist.size()) == spec.y_size,
            "history encoder: wrong output dimension");
    for (int y = 0; y < spec.y_size; ++y) {
      if (dist[y] <= 0.0) continue;
      c.tick();
      const double pxy = px * dist[y];
      c.joint_yz[t - 1][z][y] += pxy;
      c.distortion[t - 1] +=
          pxy * spec.rho(t)[x][dec.reproduction[t - 1][y][z]];
      if (t < spec.horizon) {
        c.ys.push_back(y);
        walk_history(c, dec, t + 1, pxy, dec.next_state[t - 1][y][z]);
        c.ys.pop_back();
      }
    }
    c.xs.pop_back();
  }
}

void walk_history_si(HistoryWalk& c, const SiDecoderPolicy& dec, int t,
                     double prob, int z, const Vec& belief) {
  const ProblemSpec& spec = c.spec;
  for (int x = 0; x < spec.x_size; ++x) {
    const double px =
        prob * (t == 1 ? spec.initial[x]
                       : spec.transition_into(t)[c.xs.back()][x]);
    if (px <= 0.0) continue;
    c.xs.push_back(x);
    const Vec dist = c.enc(t, c.xs, c.ys);
    require(static_cast<int>(dist.size()) == spec.y_size,
            "history encoder: wrong output dimension");
    for (int y = 0; y < spec.y_size; ++y) {
      if (dist[y] <= 0.0) continue;
      c.tick();
      const double pxy = px * dist[y];
      c.joint_yz[t - 1][z][y] += pxy;
      c.distortion[t - 1] +=
          pxy * modified_distortion(spec, belief, t, x, y, z, dec);
      if (t < spec.horizon) {
        c.ys.push_back(y);
        walk_history_si(c, dec, t + 1, pxy, dec.next_state[t - 1][y][z],
                        encoder_belief_update(spec, belief, x, y,
                                              dec.si_next_state[t - 1]));
        c.ys.pop_back();
      }
    }
    c.xs.pop_back();
  }
}

}  // namespace

CostReport evaluate_cost_history(const ProblemSpec& spec,
                                 const HistoryEncoderFn& enc,
                                 const DecoderPolicy& dec,
                                 std::uint64_t history_budget) {
  require(!spec.has_si(), "evaluate_cost_history: SI spec");
  const int zy = decoder_state_size(dec);
  HistoryWalk c{spec, enc, history_budget};
  c.distortion.assign(static_cast<std::size_t>(spec.horizon), 0.0);
  c.joint_yz.assign(static_cast<std::size_t>(spec.horizon),
                    Mat(static_cast<std::size_t>(zy),
                        Vec(static_cast<std::size_t>(spec.y_size), 0.0)));
  walk_history(c, dec, 1, 1.0, 0);
  return finish_report(spec, c.distortion, c.joint_yz);
}

CostReport evaluate_cost_si_history(const ProblemSpec& spec,
                                    const HistoryEncoderFn& enc,
                                    const SiDecoderPolicy& dec,
                                    std::uint64_t history_budget) {
  require(spec.has_si(), "evaluate_cost_si_history: spec has no SI");
  const int zy = static_cast<int>(dec.next_state[0][0].size());
  HistoryWalk c{spec, enc, history_budget};
  c.distortion.assign(static_cast<std::size_t>(spec.horizon), 0.0);
  c.joint_yz.assign(static_cast<std::size_t>(spec.horizon),
                    Mat(static_cast<std::size_t>(zy),
                        Vec(static_cast<std::size_t>(spec.y_size), 0.0)));
  Vec belief(static_cast<std::size_t>(spec.zw_size), 0.0);
  belief[0] = 1.0;
  walk_history_si(c, dec, 1, 1.0, 0, belief);
  return finish_report(spec, c.distortion, c.joint_yz);
}

CostReport evaluate_cost(const ProblemSpec& spec,
                         const FullHistoryEncoder& enc,
                         const DecoderPolicy& dec,
                         std::uint64_t history_budget) {
  HistoryEncoderFn fn = [&](int /*t*/, std::span<const int> xs,
                            std::span<const int> ys) {
    std::vector<int> key(xs.begin(), xs.end());
    key.insert(key.end(), ys.begin(), ys.end());
    auto it = enc.table.find(key);
    require(it != enc.table.end(), "full-history encoder: missing prefix");
    Vec row(static_cast<std::size_t>(spec.y_size), 0.0);
    row[static_cast<std::size_t>(it->second)] = 1.0;
    return row;
  };
  return evaluate_cost_history(spec, fn, dec, history_budget);
}

CostReport evaluate_infinite_memory(const ProblemSpec& spec,
                                    const InfiniteTrackingEncoder& enc) {
  require(!spec.has_si(), "evaluate_infinite_memory: SI spec");
  require(enc.horizon == spec.horizon && enc.y_size == spec.y_size,
          "infinite encoder: dimension mismatch");

  Vec distortion(static_cast<std::size_t>(spec.horizon), 0.0);
  std::vector<Mat> joint_py(static_cast<std::size_t>(spec.horizon));

  // mass[p][x] = P(x_t = x, y^{t-1} = p), prefixes encoded base y_size.
  Mat mass(1, spec.initial);
  for (int t = 1; t <= spec.horizon; ++t) {
    const int prefixes = static_cast<int>(mass.size());
    require(static_cast<int>(enc.table[t - 1].size()) == prefixes,
            "infinite encoder: wrong prefix dimension");
    const Mat& rho = spec.rho(t);
    Mat q(static_cast<std::size_t>(prefixes),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    Mat next(static_cast<std::size_t>(prefixes * spec.y_size),
             Vec(static_cast<std::size_t>(spec.x_size), 0.0));
    for (int p = 0; p < prefixes; ++p) {
      for (int y = 0; y < spec.y_size; ++y) {
        Vec m(static_cast<std::size_t>(spec.x_size), 0.0);
        double total = 0.0;
        for (int x = 0; x < spec.x_size; ++x) {
          if (enc.table[t - 1][p][x] != y) continue;
          m[x] = mass[p][x];
          total += m[x];
        }
        if (total <= 0.0) continue;
        q[p][y] = total;
        distortion[t - 1] += weighted_bayes(m, rho).second;
        if (t < spec.horizon) {
          const Mat& tr = spec.transition_into(t + 1);
          Vec& out = next[p * spec.y_size + y];
          for (int x = 0; x < spec.x_size; ++x) {
            if (m[x] <= 0.0) continue;
            for (int x2 = 0; x2 < spec.x_size; ++x2)
              out[x2] += m[x] * tr[x][x2];
          }
        }
      }
    }
    joint_py[t - 1] = std::move(q);
    if (t < spec.horizon) mass = std::move(next);
  }
  return finish_report(spec, distortion, joint_py);
}

CostReport evaluate_infinite_memory_si(const ProblemSpec& spec,
                                       const InfiniteTrackingEncoder& enc,
                                       const IntHyperCube& si_next_state) {
  require(spec.has_si(), "evaluate_infinite_memory_si: spec has no SI");
  require(enc.horizon == spec.horizon && enc.y_size == spec.y_size,
          "infinite encoder: dimension mismatch");

  Vec distortion(static_cast<std::size_t>(spec.horizon), 0.0);
  std::vector<Mat> joint_py(static_cast<std::size_t>(spec.horizon));

  // mass[p][x][zw] = P(x_t, z^w_{t-1}, y^{t-1} = p).
  std::vector<Mat> mass(1, Mat(static_cast<std::size_t>(spec.x_size),
                               Vec(static_cast<std::size_t>(spec.zw_size),
                                   0.0)));
  for (int x = 0; x < spec.x_size; ++x) mass[0][x][0] = spec.initial[x];

  for (int t = 1; t <= spec.horizon; ++t) {
    const int prefixes = static_cast<int>(mass.size());
    const Mat& rho = spec.rho(t);
    Mat q(static_cast<std::size_t>(prefixes),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    std::vector<Mat> next(
        static_cast<std::size_t>(prefixes * spec.y_size),
        Mat(static_cast<std::size_t>(spec.x_size),
            Vec(static_cast<std::size_t>(spec.zw_size), 0.0)));
    for (int p = 0; p < prefixes; ++p)
      for (int y = 0; y < spec.y_size; ++y) {
        // m over (x, zw) restricted to this action output.
        Mat m(static_cast<std::size_t>(spec.x_size),
              Vec(static_cast<std::size_t>(spec.zw_size), 0.0));
        double total = 0.0;
        for (int x = 0; x < spec.x_size; ++x) {
          if (enc.table[t - 1][p][x] != y) continue;
          for (int v = 0; v < spec.zw_size; ++v) {
            m[x][v] = mass[p][x][v];
            total += m[x][v];
          }
        }
        if (total <= 0.0) continue;
        q[p][y] = total;
        // Bayes reproduction sees (w, y^t, zw).
        for (int w = 0; w < spec.w_size; ++w)
          for (int v = 0; v < spec.zw_size; ++v) {
            Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
            for (int x = 0; x < spec.x_size; ++x)
              weights[x] = m[x][v] * spec.si_channel[x][w];
            distortion[t - 1] += weighted_bayes(weights, rho).second;
          }
        if (t < spec.horizon) {
          const Mat& tr = spec.transition_into(t + 1);
          Mat& out = next[p * spec.y_size + y];
          for (int x = 0; x < spec.x_size; ++x)
            for (int v = 0; v < spec.zw_size; ++v) {
              if (m[x][v] <= 0.0) continue;
              for (int w = 0; w < spec.w_size; ++w) {
                const int v2 = si_next_state[t - 1][w][y][v];
                const double mm = m[x][v] * spec.si_channel[x][w];
                for (int x2 = 0; x2 < spec.x_size; ++x2)
                  out[x2][v2] += mm * tr[x][x2];
              }
            }
        }
      }
    joint_py[t - 1] = std::move(q);
    if (t < spec.horizon) mass = std::move(next);
  }
  return finish_report(spec, distortion, joint_py);
}

double modified_distortion(const ProblemSpec& spec, const Vec& belief, int t,
                           int x, int y, int zy, const SiDecoderPolicy& dec) {
  require(spec.has_si(), "modified_distortion: spec has no SI");
  require(static_cast<int>(belief.size()) == spec.zw_size,
          "modified_distortion: belief dimension mismatch");
  const Mat& rho = spec.rho(t);
  double total = 0.0;
  for (int w = 0; w < spec.w_size; ++w)
    for (int v = 0; v < spec.zw_size; ++v)
      total += spec.si_channel[x][w] * belief[v] *
               rho[x][dec.reproduction[t - 1][w][y][v][zy]];
  return total;
}

Vec encoder_belief_update(const ProblemSpec& spec, const Vec& belief, int x,
                          int y, const IntCube& si_next_stage) {
  require(spec.has_si(), "encoder_belief_update: spec has no SI");
  require(static_cast<int>(belief.size()) == spec.zw_size,
          "encoder_belief_update: belief dimension mismatch");
  Vec next(static_cast<std::size_t>(spec.zw_size), 0.0);
  for (int w = 0; w < spec.w_size; ++w)
    for (int v = 0; v < spec.zw_size; ++v)
      next[si_next_stage[w][y][v]] += spec.si_channel[x][w] * belief[v];
  return next;
}

DecoderPolicy bayes_decoder(const ProblemSpec& spec,
                            const StochasticEncoder& enc,
                            const IntCube& next_state) {
  DecoderPolicy dec;
  dec.next_state = next_state;
  const int zy = static_cast<int>(next_state[0][0].size());
  dec.reproduction.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<int>>(
          static_cast<std::size_t>(spec.y_size),
          std::vector<int>(static_cast<std::size_t>(zy), 0)));
  const auto joints = propagate_joint(spec, enc, dec);
  for (int t = 0; t < spec.horizon; ++t) {
    const Mat& rho = spec.rho(t + 1);
    for (int y = 0; y < spec.y_size; ++y)
      for (int z = 0; z < zy; ++z) {
        Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
        double total = 0.0;
        for (int x = 0; x < spec.x_size; ++x) {
          weights[x] = joints[t].table[x][z] * enc.prob[t][x][z][y];
          total += weights[x];
        }
        if (total <= 0.0) continue;  // unreachable; stays 0
        dec.reproduction[t][y][z] = weighted_bayes(weights, rho).first;
      }
  }
  return dec;
}

DecoderPolicy bayes_decoder(const ProblemSpec& spec,
                            const TrackingEncoder& enc,
                            const IntCube& next_state) {
  return bayes_decoder(spec, to_stochastic(enc, spec.y_size), next_state);
}

SiDecoderPolicy bayes_decoder_si(const ProblemSpec& spec,
                                 const StochasticEncoder& enc,
                                 const IntCube& next_state,
                                 const IntHyperCube& si_next_state) {
  require(spec.has_si(), "bayes_decoder_si: spec has no SI");
  SiDecoderPolicy dec;
  dec.next_state = next_state;
  dec.si_next_state = si_next_state;
  const int zy = static_cast<int>(next_state[0][0].size());
  dec.reproduction.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<std::vector<std::vector<int>>>>(
          static_cast<std::size_t>(spec.w_size),
          std::vector<std::vector<std::vector<int>>>(
              static_cast<std::size_t>(spec.y_size),
              std::vector<std::vector<int>>(
                  static_cast<std::size_t>(spec.zw_size),
                  std::vector<int>(static_cast<std::size_t>(zy), 0)))));
  const auto joints = propagate_joint_si(spec, enc, dec);
  for (int t = 0; t < spec.horizon; ++t) {
    const Mat& rho = spec.rho(t + 1);
    for (int w = 0; w < spec.w_size; ++w)
      for (int y = 0; y < spec.y_size; ++y)
        for (int v = 0; v < spec.zw_size; ++v)
          for (int z = 0; z < zy; ++z) {
            Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
            double total = 0.0;
            for (int x = 0; x < spec.x_size; ++x) {
              weights[x] = joints[t].table[x][z][v] * enc.prob[t][x][z][y] *
                           spec.si_channel[x][w];
              total += weights[x];
            }
            if (total <= 0.0) continue;
            dec.reproduction[t][w][y][v][z] =
                weighted_bayes(weights, rho).first;
          }
  }
  return dec;
}

SiDecoderPolicy bayes_decoder_si(const ProblemSpec& spec,
                                 const TrackingEncoder& enc,
                                 const IntCube& next_state,
                                 const IntHyperCube& si_next_state) {
  return bayes_decoder_si(spec, to_stochastic(enc, spec.y_size), next_state,
                          si_next_state);
}

int BeliefInterner::intern(const Vec& belief) {
  std::vector<long long> key(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i)
    key[i] = std::llround(belief[i] / resolution_);
  auto [it, inserted] =
      ids_.emplace(std::move(key), static_cast<int>(beliefs_.size()));
  if (inserted) beliefs_.push_back(belief);
  return it->second;
}

}  // namespace rtcode
