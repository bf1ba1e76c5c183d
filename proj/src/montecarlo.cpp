#include "rtcode/montecarlo.hpp"

#include <cmath>

#include "rtcode/length.hpp"
#include "rtcode/rng.hpp"

namespace rtcode {

namespace {

// Length tables per (stage, decoder state) from the exact propagated
// conditionals; cells with zero mass keep empty tables and are never hit.
std::vector<std::vector<LengthFunction>> length_tables(
    const ProblemSpec& spec, const std::vector<Mat>& joint_zy) {
  std::vector<std::vector<LengthFunction>> tables(joint_zy.size());
  for (std::size_t t = 0; t < joint_zy.size(); ++t) {
    tables[t].resize(joint_zy[t].size());
    for (std::size_t z = 0; z < joint_zy[t].size(); ++z) {
      const Vec& row = joint_zy[t][z];
      double pz = 0.0;
      for (double v : row) pz += v;
      if (pz <= 0.0) continue;
      Vec cond(row.size());
      for (std::size_t y = 0; y < row.size(); ++y) cond[y] = row[y] / pz;
      tables[t][z] = huffman_expected_length(cond);
    }
  }
  return tables;
}

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) /
                     static_cast<double>(n));
  }
};

}  // namespace

SimResult simulate(const ProblemSpec& spec, const StochasticEncoder& enc,
                   const DecoderPolicy& dec, std::uint64_t n,
                   std::uint64_t seed) {
  if (n < 1) throw SpecError("simulate: n must be >= 1");
  if (spec.has_si()) throw SpecError("simulate: use simulate_si for SI specs");
  const int T = spec.horizon;
  const int zy = static_cast<int>(dec.next_state[0][0].size());

  // Exact conditionals P(y_t, z_{t-1}) for the per-state length functions.
  const auto joints = propagate_joint(spec, enc, dec);
  std::vector<Mat> joint_zy(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Mat q(static_cast<std::size_t>(zy),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z)
        for (int y = 0; y < spec.y_size; ++y)
          q[z][y] += joints[t].table[x][z] * enc.prob[t][x][z][y];
    joint_zy[t] = std::move(q);
  }
  const auto lengths = length_tables(spec, joint_zy);

  Rng rng(seed);
  Welford stats;
  Vec stage_sums(static_cast<std::size_t>(T), 0.0);

  for (std::uint64_t i = 0; i < n; ++i) {
    int x = rng.categorical(spec.initial);
    int z = 0;
    double traj = 0.0;
    for (int t = 1; t <= T; ++t) {
      const int y = rng.categorical(enc.prob[t - 1][x][z]);
      const int len = lengths[t - 1][z].lengths[y];
      const double stage =
          spec.rho(t)[x][dec.reproduction[t - 1][y][z]] + spec.lambda * len;
      traj += stage;
      stage_sums[t - 1] += stage;
      z = dec.next_state[t - 1][y][z];
      if (t < T) x = rng.categorical(spec.transition_into(t + 1)[x]);
    }
    stats.add(traj / T);
  }

  SimResult out;
  out.n = n;
  out.mean_cost = stats.mean;
  out.std_error = stats.std_error();
  out.per_stage_means.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    out.per_stage_means[t] = stage_sums[t] / static_cast<double>(n);
  return out;
}

SimResult simulate(const ProblemSpec& spec, const TrackingEncoder& enc,
                   const DecoderPolicy& dec, std::uint64_t n,
                   std::uint64_t seed) {
  return simulate(spec, to_stochastic(enc, spec.y_size), dec, n, seed);
}

SimResult simulate_si(const ProblemSpec& spec, const StochasticEncoder& enc,
                      const SiDecoderPolicy& dec, std::uint64_t n,
                      std::uint64_t seed) {
  if (n < 1) throw SpecError("simulate_si: n must be >= 1");
  if (!spec.has_si()) throw SpecError("simulate_si: spec has no SI");
  const int T = spec.horizon;
  const int zy = static_cast<int>(dec.next_state[0][0].size());

  const auto joints = propagate_joint_si(spec, enc, dec);
  std::vector<Mat> joint_zy(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Mat q(static_cast<std::size_t>(zy),
          Vec(static_cast<std::size_t>(spec.y_size), 0.0));
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z)
        for (int v = 0; v < spec.zw_size; ++v)
          for (int y = 0; y < spec.y_size; ++y)
            q[z][y] += joints[t].table[x][z][v] * enc.prob[t][x][z][y];
    joint_zy[t] = std::move(q);
  }
  const auto lengths = length_tables(spec, joint_zy);

  Rng rng(seed);
  Welford stats;
  Vec stage_sums(static_cast<std::size_t>(T), 0.0);

  for (std::uint64_t i = 0; i < n; ++i) {
    int x = rng.categorical(spec.initial);
    int z = 0, zw = 0;
    double traj = 0.0;
    for (int t = 1; t <= T; ++t) {
      const int y = rng.categorical(enc.prob[t - 1][x][z]);
      const int w = rng.categorical(spec.si_channel[x]);
      const int len = lengths[t - 1][z].lengths[y];
      const double stage =
          spec.rho(t)[x][dec.reproduction[t - 1][w][y][zw][z]] +
          spec.lambda * len;
      traj += stage;
      stage_sums[t - 1] += stage;
      zw = dec.si_next_state[t - 1][w][y][zw];
      z = dec.next_state[t - 1][y][z];
      if (t < T) x = rng.categorical(spec.transition_into(t + 1)[x]);
    }
    stats.add(traj / T);
  }

  SimResult out;
  out.n = n;
  out.mean_cost = stats.mean;
  out.std_error = stats.std_error();
  out.per_stage_means.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    out.per_stage_means[t] = stage_sums[t] / static_cast<double>(n);
  return out;
}

SimResult simulate_si(const ProblemSpec& spec, const TrackingEncoder& enc,
                      const SiDecoderPolicy& dec, std::uint64_t n,
                      std::uint64_t seed) {
  return simulate_si(spec, to_stochastic(enc, spec.y_size), dec, n, seed);
}

nlohmann::json sim_result_to_json(const SimResult& result) {
  nlohmann::json doc;
  doc["n"] = result.n;
  doc["mean_cost"] = result.mean_cost;
  doc["std_error"] = result.std_error;
  doc["per_stage_means"] = result.per_stage_means;
  return doc;
}

}  // namespace rtcode
