#include <doctest.h>

#include "rtcode/model.hpp"
#include "support.hpp"

using namespace rtcode;
using namespace rtcode::testing;

namespace {

ProblemSpec bsc_spec(double p, int horizon) {
  ProblemSpec spec;
  spec.x_size = spec.y_size = spec.zy_size = spec.xhat_size = 2;
  spec.horizon = horizon;
  spec.lambda = 1.0;
  spec.initial = {0.5, 0.5};
  for (int t = 1; t < horizon; ++t)
    spec.transitions.push_back({{1.0 - p, p}, {p, 1.0 - p}});
  spec.distortion.assign(static_cast<std::size_t>(horizon), hamming(2));
  return validate_spec(std::move(spec));
}

}  // namespace

TEST_CASE("validation rejects malformed instances") {
  ProblemSpec good = bsc_spec(0.3, 2);

  ProblemSpec bad = good;
  bad.initial = {0.5, 0.6};
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.initial = {-0.1, 1.1};
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.transitions.clear();
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.distortion[0][0][1] = -1.0;
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.lambda = -0.5;
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.w_size = 2;  // zw_size still 0
  CHECK_THROWS_AS(validate_spec(bad), SpecError);

  bad = good;
  bad.w_size = bad.zw_size = 2;
  bad.si_channel = {{1.0, 0.0}, {0.5, 0.5}};  // zero entry
  CHECK_THROWS_AS(validate_spec(bad), SpecError);
}

TEST_CASE("json round trip preserves the instance") {
  const ProblemSpec spec = random_si_spec(5, 3, 0.75);
  const ProblemSpec back = spec_from_json(spec_to_json(spec));
  CHECK(back.x_size == spec.x_size);
  CHECK(back.horizon == spec.horizon);
  CHECK(back.lambda == spec.lambda);
  CHECK(back.initial == spec.initial);
  CHECK(back.transitions == spec.transitions);
  CHECK(back.distortion == spec.distortion);
  CHECK(back.si_channel == spec.si_channel);
}

TEST_CASE("single transition matrix broadcasts to all stages") {
  nlohmann::json doc = spec_to_json(bsc_spec(0.3, 3));
  doc["transitions"] = {{0.7, 0.3}, {0.3, 0.7}};
  doc["distortion"] = {{0.0, 1.0}, {1.0, 0.0}};
  const ProblemSpec spec = spec_from_json(doc);
  REQUIRE(spec.transitions.size() == 2);
  CHECK(spec.transitions[0] == spec.transitions[1]);
  REQUIRE(spec.distortion.size() == 3);
  CHECK(spec.distortion[0] == spec.distortion[2]);
}

TEST_CASE("source marginal propagation") {
  const ProblemSpec spec = bsc_spec(0.3, 3);
  CHECK(source_marginal(spec, 1) == Vec{0.5, 0.5});
  // Uniform is stationary for the symmetric kernel.
  for (double v : source_marginal(spec, 3))
    CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

  ProblemSpec skew = spec;
  skew.initial = {1.0, 0.0};
  const Vec p2 = source_marginal(skew, 2);
  CHECK(p2[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(p2[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("second-order lift reproduces the padded-history marginals") {
  const int T = 4;
  ProblemSpec base = bsc_spec(0.3, T);
  // A genuinely second-order kernel: rows indexed by (x_{t-2}, x_{t-1}).
  Rng rng(31);
  Mat kernel(4);
  for (auto& row : kernel) row = rng.simplex(2);
  const ProblemSpec lifted = lift_korder(base, 2, {kernel});
  REQUIRE(lifted.x_size == 4);

  // Direct forward pass over histories padded with symbol 0 before stage 1.
  Mat joint(2, Vec(2, 0.0));  // joint[x_{t-1}][x_t]
  for (int x = 0; x < 2; ++x) joint[0][x] = base.initial[x];
  std::vector<Vec> direct{{joint[0][0] + joint[1][0],
                           joint[0][1] + joint[1][1]}};
  for (int t = 2; t <= T; ++t) {
    Mat next(2, Vec(2, 0.0));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          next[b][c] += joint[a][b] * kernel[a * 2 + b][c];
    joint = next;
    direct.push_back(
        {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]});
  }

  for (int t = 1; t <= T; ++t) {
    const Vec lifted_marginal = source_marginal(lifted, t);
    Vec collapsed(2, 0.0);
    for (int s = 0; s < 4; ++s) collapsed[s % 2] += lifted_marginal[s];
    for (int x = 0; x < 2; ++x)
      CHECK(collapsed[x] == doctest::Approx(direct[t - 1][x]).epsilon(1e-12));
  }
}

TEST_CASE("lifted distortion reads the newest coordinate") {
  ProblemSpec base = bsc_spec(0.3, 2);
  Mat kernel(4);
  for (int s = 0; s < 4; ++s) kernel[s] = {0.5, 0.5};
  const ProblemSpec lifted = lift_korder(base, 2, {kernel});
  for (int s = 0; s < 4; ++s)
    CHECK(lifted.distortion[0][s] == base.distortion[0][s % 2]);
}
