#include <doctest.h>

#include <cmath>

#include "rtcode/search.hpp"
#include "rtcode/system.hpp"
#include "support.hpp"

using namespace rtcode;
using namespace rtcode::testing;

namespace {

ProblemSpec bsc_uniform(double p, int horizon, double lambda) {
  ProblemSpec spec;
  spec.x_size = spec.y_size = spec.zy_size = spec.xhat_size = 2;
  spec.horizon = horizon;
  spec.lambda = lambda;
  spec.initial = {0.5, 0.5};
  for (int t = 1; t < horizon; ++t)
    spec.transitions.push_back({{1.0 - p, p}, {p, 1.0 - p}});
  spec.distortion.assign(static_cast<std::size_t>(horizon), hamming(2));
  return validate_spec(std::move(spec));
}

}  // namespace

TEST_CASE("joint propagation through a copying decoder") {
  const ProblemSpec spec = bsc_uniform(0.3, 2, 1.0);
  const DecoderPolicy dec = copy_decoder(spec);
  const TrackingEncoder enc = identity_encoder(spec, 2);
  const auto joints = propagate_joint(spec, to_stochastic(enc, 2), dec);
  REQUIRE(joints.size() == 2);
  // With y = x and z copying y, P(x_2, z_1) follows the BSC directly.
  CHECK(joints[1].table[0][0] == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(joints[1].table[1][0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(joints[1].table[0][1] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(joints[1].table[1][1] == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("constant encoder forces a degenerate state trajectory") {
  const ProblemSpec spec = bsc_uniform(0.3, 3, 1.0);
  const DecoderPolicy dec = copy_decoder(spec);
  const TrackingEncoder enc = constant_encoder(spec, 2, 1);
  const auto joints = propagate_joint(spec, to_stochastic(enc, 2), dec);
  for (int x = 0; x < 2; ++x) {
    CHECK(joints[1].table[x][0] == 0.0);
    CHECK(joints[2].table[x][0] == 0.0);
  }
}

TEST_CASE("one-stage identity system costs exactly one bit") {
  const ProblemSpec spec = bsc_uniform(0.3, 1, 1.0);
  const DecoderPolicy dec = copy_decoder(spec);
  const CostReport report =
      evaluate_cost(spec, identity_encoder(spec, 2), dec);
  CHECK(report.avg_distortion == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.avg_length == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant encoder has zero length term") {
  ProblemSpec spec = bsc_uniform(0.3, 3, 2.0);
  const DecoderPolicy dec = copy_decoder(spec);
  const CostReport report =
      evaluate_cost(spec, constant_encoder(spec, 2), dec);
  CHECK(report.avg_length == 0.0);
}

TEST_CASE("lambda zero with a constant reproduction is the blind cost") {
  ProblemSpec spec = random_spec(3, 3, 0.0);
  DecoderPolicy dec = copy_decoder(spec);
  for (auto& stage : dec.reproduction)
    for (auto& row : stage)
      for (auto& v : row) v = 0;  // always reproduce symbol 0
  const CostReport report =
      evaluate_cost(spec, identity_encoder(spec, 2), dec);
  double expected = 0.0;
  for (int t = 1; t <= spec.horizon; ++t) {
    const Vec marginal = source_marginal(spec, t);
    for (int x = 0; x < spec.x_size; ++x)
      expected += marginal[x] * spec.rho(t)[x][0];
  }
  CHECK(report.total ==
        doctest::Approx(expected / spec.horizon).epsilon(1e-12));
}

TEST_CASE("full-history evaluation agrees with the tracking evaluator") {
  const ProblemSpec spec = random_spec(17, 3, 0.8);
  const DecoderPolicy dec = copy_decoder(spec);
  const TrackingEncoder enc = identity_encoder(spec, 2);
  const CostReport direct = evaluate_cost(spec, enc, dec);

  // The same encoder expressed as a history map.
  HistoryEncoderFn fn = [&](int t, std::span<const int> xs,
                            std::span<const int> ys) {
    int z = ys.empty() ? 0 : ys.back();
    Vec row(2, 0.0);
    row[enc.table[t - 1][xs.back()][z]] = 1.0;
    return row;
  };
  const CostReport history = evaluate_cost_history(spec, fn, dec);
  CHECK(history.total == doctest::Approx(direct.total).epsilon(1e-12));
  for (int t = 0; t < spec.horizon; ++t)
    CHECK(history.per_stage[t].cost ==
          doctest::Approx(direct.per_stage[t].cost).epsilon(1e-12));
}

TEST_CASE("stochastic history encoder reduces to its induced conditional") {
  const ProblemSpec spec = random_spec(29, 2, 0.6);
  const DecoderPolicy dec = copy_decoder(spec);

  // A genuinely history-dependent stochastic encoder at stage 2.
  Rng rng(41);
  std::vector<Vec> stage1(2), stage2(16);
  for (auto& row : stage1) row = rng.simplex(2);
  for (auto& row : stage2) row = rng.simplex(2);
  HistoryEncoderFn fn = [&](int t, std::span<const int> xs,
                            std::span<const int> ys) {
    if (t == 1) return stage1[xs[0]];
    return stage2[xs[0] * 8 + xs[1] * 4 + ys[0] * 2];
  };
  const CostReport full = evaluate_cost_history(spec, fn, dec);

  // Collapse to P(y_2 | x_2, z_1) by direct enumeration, then re-evaluate.
  StochasticEncoder induced;
  induced.prob.assign(2, std::vector<std::vector<Vec>>(
                             2, std::vector<Vec>(2, Vec(2, 0.0))));
  for (int x = 0; x < 2; ++x) {
    induced.prob[0][x][0] = stage1[x];
    induced.prob[0][x][1] = {1.0, 0.0};  // unreachable at stage 1
  }
  Mat joint_num(4, Vec(2, 0.0));  // (x2, z1) -> y2 mass
  for (int x1 = 0; x1 < 2; ++x1)
    for (int y1 = 0; y1 < 2; ++y1)
      for (int x2 = 0; x2 < 2; ++x2) {
        const double base = spec.initial[x1] * stage1[x1][y1] *
                            spec.transition_into(2)[x1][x2];
        for (int y2 = 0; y2 < 2; ++y2)
          joint_num[x2 * 2 + y1][y2] +=
              base * stage2[x1 * 8 + x2 * 4 + y1 * 2][y2];
      }
  for (int x2 = 0; x2 < 2; ++x2)
    for (int z = 0; z < 2; ++z) {
      const double total = joint_num[x2 * 2 + z][0] + joint_num[x2 * 2 + z][1];
      for (int y2 = 0; y2 < 2; ++y2)
        induced.prob[1][x2][z][y2] =
            total > 0.0 ? joint_num[x2 * 2 + z][y2] / total : (y2 == 0);
    }
  const CostReport collapsed = evaluate_cost(spec, induced, dec);
  CHECK(collapsed.total == doctest::Approx(full.total).epsilon(1e-9));
  for (int t = 0; t < 2; ++t) {
    CHECK(collapsed.per_stage[t].distortion ==
          doctest::Approx(full.per_stage[t].distortion).epsilon(1e-9));
    CHECK(collapsed.per_stage[t].length ==
          doctest::Approx(full.per_stage[t].length).epsilon(1e-9));
  }
}

TEST_CASE("bayes decoder dominates every reproduction table") {
  const ProblemSpec spec = random_spec(53, 2, 0.4);
  Rng rng(53);
  const TrackingEncoder enc = sample_tracking(spec, 2, rng);
  const DecoderPolicy seed_dec = sample_decoder(spec, 2, rng);
  const DecoderPolicy bayes = bayes_decoder(spec, enc, seed_dec.next_state);
  const double best = evaluate_cost(spec, enc, bayes).total;

  // Exhaustive: 2^(T * |Y| * |Z|) = 256 reproduction tables.
  for (int mask = 0; mask < 256; ++mask) {
    DecoderPolicy alt = bayes;
    int bit = 0;
    for (auto& stage : alt.reproduction)
      for (auto& row : stage)
        for (auto& v : row) v = (mask >> bit++) & 1;
    CHECK(evaluate_cost(spec, enc, alt).total >= best - 1e-12);
  }
}

TEST_CASE("si decoder that ignores the side information matches no-SI") {
  ProblemSpec si_spec = random_si_spec(61, 2, 0.7);
  ProblemSpec plain = si_spec;
  plain.w_size = plain.zw_size = 0;
  plain.si_channel.clear();
  plain = validate_spec(std::move(plain));

  const TrackingEncoder enc = identity_encoder(si_spec, 2);
  const DecoderPolicy dec = copy_decoder(plain);

  SiDecoderPolicy si_dec;
  si_dec.next_state = dec.next_state;
  si_dec.si_next_state.assign(
      2, IntCube(2, std::vector<std::vector<int>>(
                        2, std::vector<int>(2, 0))));
  si_dec.reproduction.resize(2);
  for (int t = 0; t < 2; ++t) {
    si_dec.reproduction[t].assign(
        2, IntCube(2, std::vector<std::vector<int>>(
                          2, std::vector<int>(2, 0))));
    for (int w = 0; w < 2; ++w)
      for (int y = 0; y < 2; ++y)
        for (int v = 0; v < 2; ++v)
          for (int z = 0; z < 2; ++z)
            si_dec.reproduction[t][w][y][v][z] = dec.reproduction[t][y][z];
  }

  const CostReport with_si = evaluate_cost_si(si_spec, enc, si_dec);
  const CostReport without = evaluate_cost(plain, enc, dec);
  CHECK(with_si.total == doctest::Approx(without.total).epsilon(1e-12));
}

TEST_CASE("encoder belief recursion matches direct enumeration") {
  const ProblemSpec spec = random_si_spec(71, 3, 0.5);
  Rng rng(71);
  const SiDecoderPolicy dec = sample_si_decoder(spec, 2, rng);

  // Walk every (x^t, y^t) branch; beliefs depend only on (x^t, y^t).
  std::vector<int> xs, ys;
  auto direct_belief = [&](const std::vector<int>& xv,
                           const std::vector<int>& yv) {
    Vec b(2, 0.0);
    const int steps = static_cast<int>(xv.size());
    // Enumerate all SI sequences w^t.
    for (int mask = 0; mask < (1 << steps); ++mask) {
      double prob = 1.0;
      int zw = 0;
      for (int i = 0; i < steps; ++i) {
        const int w = (mask >> i) & 1;
        prob *= spec.si_channel[xv[i]][w];
        zw = dec.si_next_state[i][w][yv[i]][zw];
      }
      b[zw] += prob;
    }
    return b;
  };
  auto walk = [&](auto&& self, int t, Vec belief) -> void {
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        xs.push_back(x);
        ys.push_back(y);
        const Vec next = encoder_belief_update(spec, belief, x, y,
                                               dec.si_next_state[t - 1]);
        const Vec oracle = direct_belief(xs, ys);
        for (int v = 0; v < 2; ++v)
          CHECK(next[v] == doctest::Approx(oracle[v]).epsilon(1e-9));
        if (t < spec.horizon) self(self, t + 1, next);
        xs.pop_back();
        ys.pop_back();
      }
  };
  walk(walk, 1, Vec{1.0, 0.0});
}

TEST_CASE("policy json round trips") {
  const ProblemSpec spec = random_si_spec(83, 2, 0.3);
  Rng rng(83);

  const TrackingEncoder enc = sample_tracking(spec, 2, rng);
  CHECK(tracking_encoder_from_json(encoder_to_json(enc)).table == enc.table);

  const StochasticEncoder senc = sample_stochastic_tracking(spec, 2, rng);
  CHECK(stochastic_encoder_from_json(encoder_to_json(senc)).prob ==
        senc.prob);

  const DecoderPolicy dec = sample_decoder(spec, 2, rng);
  const DecoderPolicy dec2 = decoder_from_json(decoder_to_json(dec));
  CHECK(dec2.next_state == dec.next_state);
  CHECK(dec2.reproduction == dec.reproduction);

  const SiDecoderPolicy sdec = sample_si_decoder(spec, 2, rng);
  const SiDecoderPolicy sdec2 = si_decoder_from_json(decoder_to_json(sdec));
  CHECK(sdec2.next_state == sdec.next_state);
  CHECK(sdec2.reproduction == sdec.reproduction);
  CHECK(sdec2.si_next_state == sdec.si_next_state);

  FullHistoryEncoder fh;
  fh.horizon = 2;
  fh.table[{0}] = 1;
  fh.table[{0, 1, 1}] = 0;
  const FullHistoryEncoder fh2 =
      full_history_encoder_from_json(encoder_to_json(fh));
  CHECK(fh2.horizon == fh.horizon);
  CHECK(fh2.table == fh.table);
}
