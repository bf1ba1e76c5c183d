#include "rtcode/model.hpp"

#include <cmath>
#include <fstream>

namespace rtcode {

namespace {

void check_stochastic_matrix(const Mat& m, int rows, int cols,
                             const std::string& what) {
  if (static_cast<int>(m.size()) != rows)
    throw SpecError(what + ": expected " + std::to_string(rows) + " rows");
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != cols)
      throw SpecError(what + ": expected " + std::to_string(cols) +
                      " columns");
    check_probability_vector(row, what);
  }
}

}  // namespace

ProblemSpec validate_spec(ProblemSpec spec) {
  if (spec.x_size < 1) throw SpecError("x_size must be >= 1");
  if (spec.y_size < 1) throw SpecError("y_size must be >= 1");
  if (spec.zy_size < 1) throw SpecError("zy_size must be >= 1");
  if (spec.xhat_size < 1) throw SpecError("xhat_size must be >= 1");
  if (spec.horizon < 1) throw SpecError("horizon must be >= 1");
  if (!(spec.lambda >= 0.0)) throw SpecError("lambda must be >= 0");
  if ((spec.w_size > 0) != (spec.zw_size > 0))
    throw SpecError("w_size and zw_size must both be 0 or both positive");
  if ((spec.w_size > 0) != !spec.si_channel.empty())
    throw SpecError("si_channel must be present iff w_size > 0");

  if (static_cast<int>(spec.initial.size()) != spec.x_size)
    throw SpecError("initial: expected " + std::to_string(spec.x_size) +
                    " entries");
  check_probability_vector(spec.initial, "initial");

  if (static_cast<int>(spec.transitions.size()) != spec.horizon - 1)
    throw SpecError("transitions: expected " +
                    std::to_string(spec.horizon - 1) + " matrices");
  for (std::size_t t = 0; t < spec.transitions.size(); ++t)
    check_stochastic_matrix(spec.transitions[t], spec.x_size, spec.x_size,
                            "transitions[" + std::to_string(t) + "]");

  if (static_cast<int>(spec.distortion.size()) != spec.horizon)
    throw SpecError("distortion: expected " + std::to_string(spec.horizon) +
                    " tables");
  for (std::size_t t = 0; t < spec.distortion.size(); ++t) {
    const auto& table = spec.distortion[t];
    if (static_cast<int>(table.size()) != spec.x_size)
      throw SpecError("distortion[" + std::to_string(t) + "]: wrong x size");
    for (const auto& row : table) {
      if (static_cast<int>(row.size()) != spec.xhat_size)
        throw SpecError("distortion[" + std::to_string(t) +
                        "]: wrong xhat size");
      for (double v : row)
        if (!(v >= 0.0) || !std::isfinite(v))
          throw SpecError("distortion[" + std::to_string(t) +
                          "]: entries must be finite and >= 0");
    }
  }

  if (spec.has_si()) {
    check_stochastic_matrix(spec.si_channel, spec.x_size, spec.w_size,
                            "si_channel");
    for (const auto& row : spec.si_channel)
      for (double v : row)
        if (v <= 0.0)
          throw SpecError("si_channel: entries must be strictly positive");
  }
  return spec;
}

namespace {

int int_pow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

ProblemSpec lift_korder(const ProblemSpec& spec, int k,
                        const std::vector<Mat>& korder_transitions) {
  if (k < 1) throw SpecError("lift_korder: k must be >= 1");
  const int n = spec.x_size;
  const int lifted = int_pow(n, k);
  const int T = spec.horizon;

  std::vector<const Mat*> kernels(static_cast<std::size_t>(std::max(T - 1, 0)));
  if (korder_transitions.size() == 1) {
    for (auto& p : kernels) p = &korder_transitions[0];
  } else if (static_cast<int>(korder_transitions.size()) == T - 1) {
    for (int t = 0; t < T - 1; ++t) kernels[t] = &korder_transitions[t];
  } else {
    throw SpecError("lift_korder: expected 1 or horizon-1 kernels");
  }
  for (const auto* kp : kernels)
    check_stochastic_matrix(*kp, lifted, n, "korder kernel");

  ProblemSpec out = spec;
  out.x_size = lifted;
  out.initial.assign(static_cast<std::size_t>(lifted), 0.0);
  // Initial tuple (0, ..., 0, x_1): pre-history positions padded with 0.
  for (int x = 0; x < n; ++x) out.initial[x] = spec.initial[x];

  out.transitions.clear();
  for (int t = 0; t < T - 1; ++t) {
    Mat m(static_cast<std::size_t>(lifted),
          Vec(static_cast<std::size_t>(lifted), 0.0));
    const Mat& kernel = *kernels[t];
    const int tail = lifted / n;  // drop the oldest coordinate
    for (int s = 0; s < lifted; ++s)
      for (int x = 0; x < n; ++x) m[s][(s % tail) * n + x] = kernel[s][x];
    out.transitions.push_back(std::move(m));
  }

  out.distortion.clear();
  for (int t = 0; t < T; ++t) {
    Mat table(static_cast<std::size_t>(lifted));
    for (int s = 0; s < lifted; ++s) table[s] = spec.distortion[t][s % n];
    out.distortion.push_back(std::move(table));
  }

  if (spec.has_si()) {
    Mat ch(static_cast<std::size_t>(lifted));
    for (int s = 0; s < lifted; ++s) ch[s] = spec.si_channel[s % n];
    out.si_channel = std::move(ch);
  }
  return validate_spec(out);
}

Vec source_marginal(const ProblemSpec& spec, int t) {
  Vec p = spec.initial;
  for (int stage = 2; stage <= t; ++stage) {
    Vec next(p.size(), 0.0);
    const Mat& tr = spec.transition_into(stage);
    for (std::size_t x = 0; x < p.size(); ++x)
      for (std::size_t x2 = 0; x2 < next.size(); ++x2)
        next[x2] += p[x] * tr[x][x2];
    p = std::move(next);
  }
  return p;
}

namespace {

Mat mat_from_json(const nlohmann::json& j) {
  Mat m;
  for (const auto& row : j) m.push_back(row.get<Vec>());
  return m;
}

std::vector<Mat> mat_list_from_json(const nlohmann::json& j, int count,
                                    const std::string& what) {
  std::vector<Mat> out;
  const bool is_list_of_matrices =
      j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() &&
      j[0][0].is_array();
  if (is_list_of_matrices) {
    for (const auto& m : j) out.push_back(mat_from_json(m));
    if (static_cast<int>(out.size()) != count)
      throw SpecError(what + ": expected " + std::to_string(count) +
                      " tables");
  } else {
    // Single table broadcast to every stage.
    Mat m = mat_from_json(j);
    for (int i = 0; i < count; ++i) out.push_back(m);
  }
  return out;
}

}  // namespace

ProblemSpec spec_from_json(const nlohmann::json& doc) {
  ProblemSpec spec;
  spec.x_size = doc.at("x_size").get<int>();
  spec.y_size = doc.at("y_size").get<int>();
  spec.zy_size = doc.at("zy_size").get<int>();
  spec.zw_size = doc.value("zw_size", 0);
  spec.w_size = doc.value("w_size", 0);
  spec.xhat_size = doc.at("xhat_size").get<int>();
  spec.horizon = doc.at("horizon").get<int>();
  spec.lambda = doc.at("lambda").get<double>();
  spec.initial = doc.at("initial").get<Vec>();
  if (spec.horizon > 1)
    spec.transitions = mat_list_from_json(doc.at("transitions"),
                                          spec.horizon - 1, "transitions");
  else if (doc.contains("transitions") && !doc["transitions"].empty())
    spec.transitions =
        mat_list_from_json(doc.at("transitions"), 0, "transitions");
  spec.distortion =
      mat_list_from_json(doc.at("distortion"), spec.horizon, "distortion");
  if (doc.contains("si_channel"))
    spec.si_channel = mat_from_json(doc.at("si_channel"));
  return validate_spec(std::move(spec));
}

nlohmann::json spec_to_json(const ProblemSpec& spec) {
  nlohmann::json doc;
  doc["x_size"] = spec.x_size;
  doc["y_size"] = spec.y_size;
  doc["zy_size"] = spec.zy_size;
  doc["zw_size"] = spec.zw_size;
  doc["w_size"] = spec.w_size;
  doc["xhat_size"] = spec.xhat_size;
  doc["horizon"] = spec.horizon;
  doc["lambda"] = spec.lambda;
  doc["initial"] = spec.initial;
  doc["transitions"] = spec.transitions;
  doc["distortion"] = spec.distortion;
  if (spec.has_si()) doc["si_channel"] = spec.si_channel;
  return doc;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  nlohmann::json doc;
  in >> doc;
  return spec_from_json(doc);
}

}  // namespace rtcode
