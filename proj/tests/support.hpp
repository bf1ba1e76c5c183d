#pragma once

#include "rtcode/rng.hpp"
#include "rtcode/search.hpp"
#include "rtcode/system.hpp"

namespace rtcode::testing {

inline Mat hamming(int n) {
  Mat rho(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 1.0));
  for (int i = 0; i < n; ++i) rho[i][i] = 0.0;
  return rho;
}

// Random binary-ish instance with a Hamming distortion schedule.
inline ProblemSpec random_spec(std::uint64_t seed, int horizon, double lambda,
                               int x_size = 2, int y_size = 2,
                               int zy_size = 2) {
  Rng rng(seed);
  ProblemSpec spec;
  spec.x_size = x_size;
  spec.y_size = y_size;
  spec.zy_size = zy_size;
  spec.xhat_size = x_size;
  spec.horizon = horizon;
  spec.lambda = lambda;
  spec.initial = rng.simplex(x_size);
  for (int t = 1; t < horizon; ++t) {
    Mat tr(static_cast<std::size_t>(x_size));
    for (auto& row : tr) row = rng.simplex(x_size);
    spec.transitions.push_back(std::move(tr));
  }
  spec.distortion.assign(static_cast<std::size_t>(horizon), hamming(x_size));
  return validate_spec(std::move(spec));
}

// Adds a strictly positive memoryless SI channel.
inline ProblemSpec random_si_spec(std::uint64_t seed, int horizon,
                                  double lambda, int w_size = 2,
                                  int zw_size = 2) {
  ProblemSpec spec = random_spec(seed, horizon, lambda);
  spec.w_size = w_size;
  spec.zw_size = zw_size;
  Rng rng(derive_seed(seed, 7));
  spec.si_channel.resize(static_cast<std::size_t>(spec.x_size));
  for (auto& row : spec.si_channel) {
    row = rng.simplex(w_size);
    // Keep the channel strictly positive.
    double total = 0.0;
    for (auto& v : row) {
      v = 0.9 * v + 0.1 / w_size;
      total += v;
    }
    for (auto& v : row) v /= total;
  }
  return validate_spec(std::move(spec));
}

// Decoder whose state copies the last received index (zy = y_size) and
// reproduces x_hat = y.
inline DecoderPolicy copy_decoder(const ProblemSpec& spec) {
  DecoderPolicy dec;
  dec.next_state.resize(static_cast<std::size_t>(spec.horizon));
  dec.reproduction.resize(static_cast<std::size_t>(spec.horizon));
  for (int t = 0; t < spec.horizon; ++t) {
    dec.next_state[t].assign(
        static_cast<std::size_t>(spec.y_size),
        std::vector<int>(static_cast<std::size_t>(spec.y_size), 0));
    dec.reproduction[t] = dec.next_state[t];
    for (int y = 0; y < spec.y_size; ++y)
      for (int z = 0; z < spec.y_size; ++z) {
        dec.next_state[t][y][z] = y;
        dec.reproduction[t][y][z] = y;
      }
  }
  return dec;
}

// Identity tracking encoder y = x, ignoring the decoder state.
inline TrackingEncoder identity_encoder(const ProblemSpec& spec, int zy) {
  TrackingEncoder enc;
  enc.table.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<int>>(
          static_cast<std::size_t>(spec.x_size),
          std::vector<int>(static_cast<std::size_t>(zy), 0)));
  for (auto& stage : enc.table)
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z) stage[x][z] = x % spec.y_size;
  return enc;
}

inline TrackingEncoder constant_encoder(const ProblemSpec& spec, int zy,
                                        int y = 0) {
  TrackingEncoder enc = identity_encoder(spec, zy);
  for (auto& stage : enc.table)
    for (auto& row : stage)
      for (auto& v : row) v = y;
  return enc;
}

}  // namespace rtcode::testing
