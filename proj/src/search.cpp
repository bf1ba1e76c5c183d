#include "rtcode/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "rtcode/length.hpp"

namespace rtcode {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw SpecError(msg);
}

// base^exp with overflow/budget guard; throws BudgetExceeded when the
// candidate count cannot be enumerated.
std::uint64_t pow_budget(std::uint64_t base, std::uint64_t exp,
                         std::uint64_t budget) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > budget / base + 1)
      throw BudgetExceeded("candidate space exceeds budget");
    r *= base;
  }
  if (r > budget) throw BudgetExceeded("candidate space exceeds budget");
  return r;
}

// digits[0] is the most significant, so ascending indices enumerate tables
// in lexicographic order.
std::vector<int> index_digits(std::uint64_t index, int base, int count) {
  std::vector<int> digits(static_cast<std::size_t>(count), 0);
  for (int i = count - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return digits;
}

double min_envelope(const Vec& weights, const Mat& rho) {
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

// Deterministic parallel argmin over candidate indices; ties go to the
// smaller index regardless of scheduling.
template <class EvalFn>
std::pair<double, std::uint64_t> parallel_argmin(std::uint64_t count,
                                                 int threads,
                                                 const EvalFn& eval) {
  threads = std::max(1, threads);
  if (static_cast<std::uint64_t>(threads) > count)
    threads = static_cast<int>(count);
  std::vector<std::pair<double, std::uint64_t>> locals(
      static_cast<std::size_t>(threads));
  auto worker = [&](int id) {
    const std::uint64_t lo = count * id / threads;
    const std::uint64_t hi = count * (id + 1) / threads;
    double best = 0.0;
    std::uint64_t best_idx = lo;
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const double cost = eval(idx);
      if (idx == lo || cost < best) {
        best = cost;
        best_idx = idx;
      }
    }
    locals[static_cast<std::size_t>(id)] = {best, best_idx};
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int id = 0; id < threads; ++id) pool.emplace_back(worker, id);
    for (auto& th : pool) th.join();
  }
  auto best = locals[0];
  for (const auto& cand : locals)
    if (cand.first < best.first ||
        (cand.first == best.first && cand.second < best.second))
      best = cand;
  return best;
}

}  // namespace

SearchResult optimize_tracking(const ProblemSpec& spec,
                               const DecoderPolicy& dec,
                               const SearchOptions& opts) {
  require(!spec.has_si(), "optimize_tracking: SI spec");
  const int zy = static_cast<int>(dec.next_state[0][0].size());
  const int digits = spec.horizon * spec.x_size * zy;
  const std::uint64_t count =
      pow_budget(static_cast<std::uint64_t>(spec.y_size),
                 static_cast<std::uint64_t>(digits), opts.budget);

  auto decode = [&](std::uint64_t index) {
    const auto d = index_digits(index, spec.y_size, digits);
    TrackingEncoder enc;
    enc.table.assign(
        static_cast<std::size_t>(spec.horizon),
        std::vector<std::vector<int>>(
            static_cast<std::size_t>(spec.x_size),
            std::vector<int>(static_cast<std::size_t>(zy), 0)));
    int i = 0;
    for (int t = 0; t < spec.horizon; ++t)
      for (int x = 0; x < spec.x_size; ++x)
        for (int z = 0; z < zy; ++z) enc.table[t][x][z] = d[i++];
    return enc;
  };

  auto [best_cost, best_idx] =
      parallel_argmin(count, opts.threads, [&](std::uint64_t idx) {
        return evaluate_cost(spec, decode(idx), dec).total;
      });

  SearchResult out;
  out.tracking = decode(best_idx);
  out.report = evaluate_cost(spec, *out.tracking, dec);
  out.best_cost = out.report.total;
  out.candidates_evaluated = count;
  (void)best_cost;
  return out;
}

namespace {

// x-prefix tree layout for full-history searches: stage t holds
// x_size^t nodes keyed by the base-x_size encoding of x^t.
struct PrefixTree {
  std::vector<int> offset;       // per stage, into the flat digit vector
  std::vector<std::uint64_t> stage_nodes;
  int total = 0;
};

PrefixTree build_prefix_tree(const ProblemSpec& spec, std::uint64_t budget) {
  PrefixTree tree;
  std::uint64_t nodes = 1;
  for (int t = 1; t <= spec.horizon; ++t) {
    nodes *= static_cast<std::uint64_t>(spec.x_size);
    if (nodes > budget)
      throw BudgetExceeded("history prefix tree exceeds budget");
    tree.offset.push_back(tree.total);
    tree.stage_nodes.push_back(nodes);
    tree.total += static_cast<int>(nodes);
  }
  return tree;
}

int prefix_code(std::span<const int> xs, int base) {
  int code = 0;
  for (int x : xs) code = code * base + x;
  return code;
}

HistoryEncoderFn digit_encoder(const ProblemSpec& spec, const PrefixTree& tree,
                               const std::vector<int>& digits) {
  return [&spec, &tree, &digits](int t, std::span<const int> xs,
                                 std::span<const int>) {
    Vec row(static_cast<std::size_t>(spec.y_size), 0.0);
    row[digits[tree.offset[t - 1] + prefix_code(xs, spec.x_size)]] = 1.0;
    return row;
  };
}

FullHistoryEncoder digits_to_full_history(const ProblemSpec& spec,
                                          const PrefixTree& tree,
                                          const std::vector<int>& digits) {
  FullHistoryEncoder enc;
  enc.horizon = spec.horizon;
  // DFS over all x-paths; the y-history is determined by the digits.
  std::vector<int> xs, ys;
  auto rec = [&](auto&& self, int t) -> void {
    for (int x = 0; x < spec.x_size; ++x) {
      xs.push_back(x);
      const int y = digits[tree.offset[t - 1] + prefix_code(xs, spec.x_size)];
      std::vector<int> key(xs);
      key.insert(key.end(), ys.begin(), ys.end());
      enc.table[std::move(key)] = y;
      if (t < spec.horizon) {
        ys.push_back(y);
        self(self, t + 1);
        ys.pop_back();
      }
      xs.pop_back();
    }
  };
  rec(rec, 1);
  return enc;
}

}  // namespace

SearchResult optimize_full_history(const ProblemSpec& spec,
                                   const DecoderPolicy& dec,
                                   const SearchOptions& opts) {
  require(!spec.has_si(), "optimize_full_history: SI spec");
  const PrefixTree tree = build_prefix_tree(spec, opts.budget);
  const std::uint64_t count =
      pow_budget(static_cast<std::uint64_t>(spec.y_size),
                 static_cast<std::uint64_t>(tree.total), opts.budget);

  auto [best_cost, best_idx] =
      parallel_argmin(count, opts.threads, [&](std::uint64_t idx) {
        const auto digits = index_digits(idx, spec.y_size, tree.total);
        return evaluate_cost_history(spec, digit_encoder(spec, tree, digits),
                                     dec)
            .total;
      });
  (void)best_cost;

  const auto digits = index_digits(best_idx, spec.y_size, tree.total);
  SearchResult out;
  out.full_history = digits_to_full_history(spec, tree, digits);
  out.report =
      evaluate_cost_history(spec, digit_encoder(spec, tree, digits), dec);
  out.best_cost = out.report.total;
  out.candidates_evaluated = count;
  return out;
}

SearchResult optimize_tracking_infinite(const ProblemSpec& spec,
                                        const SearchOptions& opts) {
  require(!spec.has_si(), "optimize_tracking_infinite: SI spec");
  // Stage t has y_size^(t-1) prefixes, each with x_size digits.
  std::vector<int> offset;
  std::vector<int> prefixes;
  int total = 0;
  std::uint64_t p = 1;
  for (int t = 1; t <= spec.horizon; ++t) {
    offset.push_back(total);
    prefixes.push_back(static_cast<int>(p));
    total += static_cast<int>(p) * spec.x_size;
    if (static_cast<std::uint64_t>(total) > opts.budget)
      throw BudgetExceeded("prefix table exceeds budget");
    p *= static_cast<std::uint64_t>(spec.y_size);
  }
  const std::uint64_t count =
      pow_budget(static_cast<std::uint64_t>(spec.y_size),
                 static_cast<std::uint64_t>(total), opts.budget);

  auto decode = [&](std::uint64_t index) {
    const auto d = index_digits(index, spec.y_size, total);
    InfiniteTrackingEncoder enc;
    enc.horizon = spec.horizon;
    enc.y_size = spec.y_size;
    enc.table.resize(static_cast<std::size_t>(spec.horizon));
    int i = 0;
    for (int t = 0; t < spec.horizon; ++t) {
      enc.table[t].assign(
          static_cast<std::size_t>(prefixes[t]),
          std::vector<int>(static_cast<std::size_t>(spec.x_size), 0));
      for (int pp = 0; pp < prefixes[t]; ++pp)
        for (int x = 0; x < spec.x_size; ++x) enc.table[t][pp][x] = d[i++];
    }
    return enc;
  };

  auto [best_cost, best_idx] =
      parallel_argmin(count, opts.threads, [&](std::uint64_t idx) {
        return evaluate_infinite_memory(spec, decode(idx)).total;
      });
  (void)best_cost;

  SearchResult out;
  out.infinite = decode(best_idx);
  out.report = evaluate_infinite_memory(spec, *out.infinite);
  out.best_cost = out.report.total;
  out.candidates_evaluated = count;
  return out;
}

namespace {

// DP over the design state mu_t = P(x_t, z_{t-1}), which is a deterministic
// function of the tables chosen so far; memoization shares subtrees across
// table prefixes. shift_map, when set, pins the next-state function and
// only encoders are searched.
struct SystemDp {
  const ProblemSpec& spec;
  int zy;
  std::uint64_t budget;
  const std::vector<std::vector<int>>* shift_map;  // [z][y] -> z', optional
  std::uint64_t expansions = 0;

  struct Entry {
    double value = 0.0;
    std::vector<int> f;  // x * zy flattened, row-major in x
    std::vector<int> r;  // y * zy flattened, row-major in y
  };
  std::vector<std::map<std::vector<long long>, Entry>> memo;

  explicit SystemDp(const ProblemSpec& s, int zy_size, std::uint64_t b,
                    const std::vector<std::vector<int>>* shift)
      : spec(s), zy(zy_size), budget(b), shift_map(shift) {
    memo.resize(static_cast<std::size_t>(spec.horizon));
  }

  static std::vector<long long> key_of(const Mat& mu) {
    std::vector<long long> key;
    key.reserve(mu.size() * mu[0].size());
    for (const auto& row : mu)
      for (double v : row) key.push_back(std::llround(v * 1e12));
    return key;
  }

  void tick() {
    if (++expansions > budget)
      throw BudgetExceeded("design-state expansions exceed budget");
  }

  double solve(int t, const Mat& mu) {
    auto key = key_of(mu);
    auto& table = memo[static_cast<std::size_t>(t - 1)];
    if (auto it = table.find(key); it != table.end())
      return it->second.value;

    std::vector<std::pair<int, int>> support;
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z)
        if (mu[x][z] > 0.0) support.emplace_back(x, z);

    const Mat& rho = spec.rho(t);
    Entry best;
    bool have_best = false;
    std::vector<int> f_assign(support.size(), 0);
    for (;;) {
      tick();
      // Stage cost of this encoder choice.
      Mat q(static_cast<std::size_t>(zy),
            Vec(static_cast<std::size_t>(spec.y_size), 0.0));
      for (std::size_t i = 0; i < support.size(); ++i)
        q[support[i].second][f_assign[i]] += mu[support[i].first]
                                               [support[i].second];
      double distortion = 0.0;
      for (int z = 0; z < zy; ++z)
        for (int y = 0; y < spec.y_size; ++y) {
          if (q[z][y] <= 0.0) continue;
          Vec weights(static_cast<std::size_t>(spec.x_size), 0.0);
          for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i].second == z && f_assign[i] == y)
              weights[support[i].first] = mu[support[i].first][z];
          distortion += min_envelope(weights, rho);
        }
      const double gamma =
          distortion + spec.lambda * conditional_expected_length(q);

      if (t == spec.horizon) {
        if (!have_best || gamma < best.value) {
          have_best = true;
          best.value = gamma;
          best.f = flatten_f(support, f_assign);
          best.r.clear();
        }
      } else {
        minimize_tail(t, mu, q, support, f_assign, gamma, best, have_best);
      }

      // Advance the encoder odometer (last cell fastest => lexicographic).
      std::size_t i = support.size();
      while (i > 0 && ++f_assign[i - 1] == spec.y_size)
        f_assign[--i] = 0;
      if (i == 0) break;
    }

    require(have_best, "design-state DP: empty support");
    const double value = best.value;
    table.emplace(std::move(key), std::move(best));
    return value;
  }

  std::vector<int> flatten_f(const std::vector<std::pair<int, int>>& support,
                             const std::vector<int>& assign) const {
    std::vector<int> f(static_cast<std::size_t>(spec.x_size * zy), 0);
    for (std::size_t i = 0; i < support.size(); ++i)
      f[support[i].first * zy + support[i].second] = assign[i];
    return f;
  }

  void minimize_tail(int t, const Mat& mu, const Mat& q,
                     const std::vector<std::pair<int, int>>& support,
                     const std::vector<int>& f_assign, double gamma,
                     Entry& best, bool& have_best) {
    std::vector<std::pair<int, int>> cells;  // (z, y) with positive mass
    for (int z = 0; z < zy; ++z)
      for (int y = 0; y < spec.y_size; ++y)
        if (q[z][y] > 0.0) cells.emplace_back(z, y);

    const Mat& tr = spec.transition_into(t + 1);
    auto push_forward = [&](const std::vector<int>& r_of_cell) {
      Mat next(static_cast<std::size_t>(spec.x_size),
               Vec(static_cast<std::size_t>(zy), 0.0));
      for (std::size_t i = 0; i < support.size(); ++i) {
        const auto [x, z] = support[i];
        const int y = f_assign[i];
        int z2 = 0;
        for (std::size_t c = 0; c < cells.size(); ++c)
          if (cells[c].first == z && cells[c].second == y) {
            z2 = r_of_cell[c];
            break;
          }
        const double mass = mu[x][z];
        for (int x2 = 0; x2 < spec.x_size; ++x2)
          next[x2][z2] += mass * tr[x][x2];
      }
      return next;
    };

    auto consider = [&](const std::vector<int>& r_of_cell) {
      tick();
      const double total = gamma + solve(t + 1, push_forward(r_of_cell));
      if (!have_best || total < best.value) {
        have_best = true;
        best.value = total;
        best.f = flatten_f(support, f_assign);
        best.r.assign(static_cast<std::size_t>(spec.y_size * zy), 0);
        for (std::size_t c = 0; c < cells.size(); ++c)
          best.r[cells[c].second * zy + cells[c].first] = r_of_cell[c];
      }
    };

    if (shift_map) {
      std::vector<int> fixed(cells.size());
      for (std::size_t c = 0; c < cells.size(); ++c)
        fixed[c] = (*shift_map)[cells[c].first][cells[c].second];
      consider(fixed);
      return;
    }
    std::vector<int> r_assign(cells.size(), 0);
    for (;;) {
      consider(r_assign);
      std::size_t i = cells.size();
      while (i > 0 && ++r_assign[i - 1] == zy) r_assign[--i] = 0;
      if (i == 0) break;
    }
  }
};

SearchResult run_system_dp(const ProblemSpec& spec, int zy,
                           const std::vector<std::vector<int>>* shift_map,
                           std::uint64_t budget) {
  SystemDp dp(spec, zy, budget, shift_map);
  Mat mu(static_cast<std::size_t>(spec.x_size),
         Vec(static_cast<std::size_t>(zy), 0.0));
  for (int x = 0; x < spec.x_size; ++x) mu[x][0] = spec.initial[x];
  const double value = dp.solve(1, mu);

  // Forward walk to materialize the chosen tables.
  TrackingEncoder enc;
  IntCube next_state;
  for (int t = 1; t <= spec.horizon; ++t) {
    const auto& entry =
        dp.memo[static_cast<std::size_t>(t - 1)].at(SystemDp::key_of(mu));
    std::vector<std::vector<int>> f_stage(
        static_cast<std::size_t>(spec.x_size),
        std::vector<int>(static_cast<std::size_t>(zy), 0));
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z) f_stage[x][z] = entry.f[x * zy + z];
    enc.table.push_back(f_stage);

    std::vector<std::vector<int>> r_stage(
        static_cast<std::size_t>(spec.y_size),
        std::vector<int>(static_cast<std::size_t>(zy), 0));
    if (shift_map) {
      for (int y = 0; y < spec.y_size; ++y)
        for (int z = 0; z < zy; ++z) r_stage[y][z] = (*shift_map)[z][y];
    } else if (!entry.r.empty()) {
      for (int y = 0; y < spec.y_size; ++y)
        for (int z = 0; z < zy; ++z) r_stage[y][z] = entry.r[y * zy + z];
    }
    next_state.push_back(r_stage);

    if (t < spec.horizon) {
      Mat next(static_cast<std::size_t>(spec.x_size),
               Vec(static_cast<std::size_t>(zy), 0.0));
      const Mat& tr = spec.transition_into(t + 1);
      for (int x = 0; x < spec.x_size; ++x)
        for (int z = 0; z < zy; ++z) {
          const double mass = mu[x][z];
          if (mass <= 0.0) continue;
          const int z2 = r_stage[f_stage[x][z]][z];
          for (int x2 = 0; x2 < spec.x_size; ++x2)
            next[x2][z2] += mass * tr[x][x2];
        }
      mu = std::move(next);
    }
  }

  SearchResult out;
  out.tracking = enc;
  out.decoder = bayes_decoder(spec, enc, next_state);
  out.report = evaluate_cost(spec, enc, *out.decoder);
  out.best_cost = value / spec.horizon;
  out.candidates_evaluated = dp.expansions;
  return out;
}

}  // namespace

SearchResult optimize_system(const ProblemSpec& spec, int zy_size,
                             const SearchOptions& opts) {
  require(!spec.has_si(), "optimize_system: SI spec");
  require(zy_size >= 1, "optimize_system: zy_size must be >= 1");
  return run_system_dp(spec, zy_size, nullptr, opts.budget);
}

SearchResult optimize_sliding_window(const ProblemSpec& spec, int l,
                                     const SearchOptions& opts) {
  require(!spec.has_si(), "optimize_sliding_window: SI spec");
  require(l >= 1, "optimize_sliding_window: l must be >= 1");
  require(spec.horizon % l == 0,
          "optimize_sliding_window: l must divide the horizon");
  // Window states are l digits base (y_size + 1); digit 0 is the null
  // padding symbol, digit y+1 is output y. State 0 = all-null start.
  int zy = 1;
  for (int i = 0; i < l; ++i) {
    zy *= spec.y_size + 1;
    if (zy > 1 << 20)
      throw BudgetExceeded("window state space exceeds budget");
  }
  const int tail = zy / (spec.y_size + 1);
  std::vector<std::vector<int>> shift(
      static_cast<std::size_t>(zy),
      std::vector<int>(static_cast<std::size_t>(spec.y_size), 0));
  for (int z = 0; z < zy; ++z)
    for (int y = 0; y < spec.y_size; ++y)
      shift[z][y] = (z % tail) * (spec.y_size + 1) + (y + 1);
  return run_system_dp(spec, zy, &shift, opts.budget);
}

TheoremReport check_theorem1(const ProblemSpec& spec, const DecoderPolicy& dec,
                             int samples, std::uint64_t seed,
                             const SearchOptions& opts) {
  TheoremReport report;
  report.name = "theorem1_structure";
  const SearchResult full = optimize_full_history(spec, dec, opts);
  const SearchResult tracking = optimize_tracking(spec, dec, opts);
  report.lhs = full.best_cost;
  report.rhs = tracking.best_cost;
  report.slack = report.lhs - report.rhs;

  const int zy = static_cast<int>(dec.next_state[0][0].size());
  Rng rng(seed);
  double sampled_min = 0.0;
  for (int i = 0; i < samples; ++i) {
    const StochasticEncoder enc = sample_stochastic_tracking(spec, zy, rng);
    const double cost = evaluate_cost(spec, enc, dec).total;
    if (i == 0 || cost < sampled_min) sampled_min = cost;
  }
  const bool sampled_ok =
      samples == 0 || sampled_min >= report.rhs - kCompareTol;
  report.holds = std::abs(report.slack) <= kCompareTol && sampled_ok;
  report.note =
      "sampled stochastic encoders are evidence, not proof, of optimality "
      "over the stochastic class";
  report.details = {{"sampled_min", sampled_min},
                    {"samples", samples},
                    {"sampled_ok", sampled_ok}};
  return report;
}

TheoremReport check_theorem3(const ProblemSpec& spec, int zy_size, int l,
                             const SearchOptions& opts) {
  TheoremReport report;
  report.name = "theorem3_bound";
  const SearchResult system = optimize_system(spec, zy_size, opts);
  const SearchResult window = optimize_sliding_window(spec, l, opts);
  report.lhs = system.best_cost;
  report.rhs =
      window.best_cost - spec.lambda * std::log2(double(zy_size)) / l;
  report.slack = report.lhs - report.rhs;
  report.holds = report.slack >= -kCompareTol;
  report.details = {{"system_cost", system.best_cost},
                    {"window_cost", window.best_cost},
                    {"zy_size", zy_size},
                    {"l", l}};
  return report;
}

namespace {

// Enumerates deterministic full-history encoders under SI, constrained so
// that histories sharing the same group key at each stage get the same
// output. key_fn(node_index, belief_id, x, zy) returns that key;
// returning node_index makes the search unconstrained.
struct SiGroupedSearch {
  const ProblemSpec& spec;
  const SiDecoderPolicy& dec;
  std::uint64_t budget;
  std::uint64_t evaluated = 0;
  BeliefInterner interner = BeliefInterner(1e-9);

  struct Node {
    std::vector<int> xs;
    double prob = 0.0;
    int zy = 0;
    Vec belief;  // encoder belief over z^w before this stage
  };

  using KeyFn = std::function<std::vector<int>(int node, int belief_id, int x,
                                               int zy)>;
  KeyFn key_fn;
  std::map<std::vector<int>, int> assignment;  // x-prefix -> y
  double best = 0.0;
  bool have_best = false;

  double run() {
    Vec b0(static_cast<std::size_t>(spec.zw_size), 0.0);
    b0[0] = 1.0;
    std::vector<Node> roots;
    for (int x = 0; x < spec.x_size; ++x) {
      if (spec.initial[x] <= 0.0) continue;
      roots.push_back({{x}, spec.initial[x], 0, b0});
    }
    recurse(1, roots);
    require(have_best, "grouped search: no candidates");
    return best;
  }

  void recurse(int t, const std::vector<Node>& nodes) {
    // Group the stage-t histories by key.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      groups[key_fn(static_cast<int>(i), interner.intern(n.belief),
                    n.xs.back(), n.zy)]
          .push_back(static_cast<int>(i));
    }
    std::vector<const std::vector<int>*> members;
    for (const auto& [key, idxs] : groups) members.push_back(&idxs);

    std::vector<int> choice(members.size(), 0);
    for (;;) {
      for (std::size_t g = 0; g < members.size(); ++g)
        for (int i : *members[g]) assignment[nodes[i].xs] = choice[g];

      if (t == spec.horizon) {
        if (++evaluated > budget)
          throw BudgetExceeded("grouped search exceeds budget");
        evaluate_candidate();
      } else {
        std::vector<Node> next;
        for (const Node& n : nodes) {
          const int y = assignment[n.xs];
          const int x = n.xs.back();
          Node child;
          child.zy = dec.next_state[t - 1][y][n.zy];
          child.belief = encoder_belief_update(spec, n.belief, x, y,
                                               dec.si_next_state[t - 1]);
          const Mat& tr = spec.transition_into(t + 1);
          for (int x2 = 0; x2 < spec.x_size; ++x2) {
            if (tr[x][x2] <= 0.0) continue;
            Node c = child;
            c.xs = n.xs;
            c.xs.push_back(x2);
            c.prob = n.prob * tr[x][x2];
            next.push_back(std::move(c));
          }
        }
        recurse(t + 1, next);
      }

      std::size_t g = members.size();
      while (g > 0 && ++choice[g - 1] == spec.y_size) choice[--g] = 0;
      if (g == 0) break;
    }
    for (const Node& n : nodes) assignment.erase(n.xs);
  }

  void evaluate_candidate() {
    HistoryEncoderFn fn = [this](int, std::span<const int> xs,
                                 std::span<const int>) {
      Vec row(static_cast<std::size_t>(spec.y_size), 0.0);
      row[assignment.at(std::vector<int>(xs.begin(), xs.end()))] = 1.0;
      return row;
    };
    const double cost = evaluate_cost_si_history(spec, fn, dec).total;
    if (!have_best || cost < best) {
      have_best = true;
      best = cost;
    }
  }
};

}  // namespace

TheoremReport check_theorem6(const ProblemSpec& spec,
                             const SiDecoderPolicy& dec,
                             const SearchOptions& opts) {
  require(spec.has_si(), "check_theorem6: spec has no SI");
  TheoremReport report;
  report.name = "theorem6_si_structure";

  SiGroupedSearch unconstrained{spec, dec, opts.budget};
  unconstrained.key_fn = [](int node, int, int, int) {
    return std::vector<int>{node};
  };
  report.lhs = unconstrained.run();

  SiGroupedSearch grouped{spec, dec, opts.budget};
  grouped.key_fn = [](int, int belief_id, int x, int zy) {
    return std::vector<int>{belief_id, x, zy};
  };
  report.rhs = grouped.run();

  report.slack = report.lhs - report.rhs;
  report.holds = std::abs(report.slack) <= kCompareTol;
  report.details = {{"unconstrained_candidates", unconstrained.evaluated},
                    {"grouped_candidates", grouped.evaluated}};
  return report;
}

ConcavityReport sample_concavity(const ProblemSpec& spec,
                                 const DecoderPolicy& dec, int stage,
                                 std::uint64_t trials, std::uint64_t seed) {
  require(!spec.has_si(), "sample_concavity: SI spec");
  require(stage >= 1 && stage <= spec.horizon, "sample_concavity: bad stage");
  const int zy = static_cast<int>(dec.next_state[0][0].size());

  ConcavityReport report;
  report.trials = trials;
  Rng rng(seed);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    StochasticEncoder base = sample_stochastic_tracking(spec, zy, rng);
    StochasticEncoder e1 = base, e2 = base, emix = base;
    const double alpha = rng.uniform01();
    for (int x = 0; x < spec.x_size; ++x)
      for (int z = 0; z < zy; ++z) {
        e1.prob[stage - 1][x][z] = rng.simplex(spec.y_size);
        e2.prob[stage - 1][x][z] = rng.simplex(spec.y_size);
        for (int y = 0; y < spec.y_size; ++y)
          emix.prob[stage - 1][x][z][y] =
              alpha * e1.prob[stage - 1][x][z][y] +
              (1.0 - alpha) * e2.prob[stage - 1][x][z][y];
      }

    const CostReport r1 = evaluate_cost(spec, e1, dec);
    const CostReport r2 = evaluate_cost(spec, e2, dec);
    const CostReport rm = evaluate_cost(spec, emix, dec);

    auto future = [&](const CostReport& r) {
      double total = 0.0;
      for (int t = stage; t < spec.horizon; ++t)
        total += r.per_stage[static_cast<std::size_t>(t)].cost;
      return total;
    };
    const double stage_gap =
        rm.per_stage[stage - 1].cost -
        (alpha * r1.per_stage[stage - 1].cost +
         (1.0 - alpha) * r2.per_stage[stage - 1].cost);
    const double future_gap =
        future(rm) - (alpha * future(r1) + (1.0 - alpha) * future(r2));

    if (stage_gap < -kCompareTol) ++report.stage_violations;
    if (future_gap < -kCompareTol) ++report.future_violations;
    report.worst_slack =
        std::min({report.worst_slack, stage_gap, future_gap});
  }
  return report;
}

TrackingEncoder sample_tracking(const ProblemSpec& spec, int zy, Rng& rng) {
  TrackingEncoder enc;
  enc.table.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<int>>(
          static_cast<std::size_t>(spec.x_size),
          std::vector<int>(static_cast<std::size_t>(zy), 0)));
  for (auto& stage : enc.table)
    for (auto& row : stage)
      for (auto& v : row) v = rng.uniform_int(spec.y_size);
  return enc;
}

StochasticEncoder sample_stochastic_tracking(const ProblemSpec& spec, int zy,
                                             Rng& rng) {
  StochasticEncoder enc;
  enc.prob.resize(static_cast<std::size_t>(spec.horizon));
  for (auto& stage : enc.prob) {
    stage.resize(static_cast<std::size_t>(spec.x_size));
    for (auto& per_x : stage) {
      per_x.resize(static_cast<std::size_t>(zy));
      for (auto& row : per_x) row = rng.simplex(spec.y_size);
    }
  }
  return enc;
}

DecoderPolicy sample_decoder(const ProblemSpec& spec, int zy, Rng& rng) {
  DecoderPolicy dec;
  dec.next_state.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<int>>(
          static_cast<std::size_t>(spec.y_size),
          std::vector<int>(static_cast<std::size_t>(zy), 0)));
  dec.reproduction = dec.next_state;
  for (auto& stage : dec.next_state)
    for (auto& row : stage)
      for (auto& v : row) v = rng.uniform_int(zy);
  for (auto& stage : dec.reproduction)
    for (auto& row : stage)
      for (auto& v : row) v = rng.uniform_int(spec.xhat_size);
  return dec;
}

SiDecoderPolicy sample_si_decoder(const ProblemSpec& spec, int zy, Rng& rng) {
  SiDecoderPolicy dec;
  dec.next_state.assign(
      static_cast<std::size_t>(spec.horizon),
      std::vector<std::vector<int>>(
          static_cast<std::size_t>(spec.y_size),
          std::vector<int>(static_cast<std::size_t>(zy), 0)));
  for (auto& stage : dec.next_state)
    for (auto& row : stage)
      for (auto& v : row) v = rng.uniform_int(zy);
  dec.si_next_state.assign(static_cast<std::size_t>(spec.horizon), {});
  for (auto& stage : dec.si_next_state) {
    stage.resize(static_cast<std::size_t>(spec.w_size));
    for (auto& per_w : stage) {
      per_w.resize(static_cast<std::size_t>(spec.y_size));
      for (auto& row : per_w) {
        row.resize(static_cast<std::size_t>(spec.zw_size));
        for (auto& v : row) v = rng.uniform_int(spec.zw_size);
      }
    }
  }
  dec.reproduction.resize(static_cast<std::size_t>(spec.horizon));
  for (auto& stage : dec.reproduction) {
    stage.resize(static_cast<std::size_t>(spec.w_size));
    for (auto& per_w : stage) {
      per_w.resize(static_cast<std::size_t>(spec.y_size));
      for (auto& per_y : per_w) {
        per_y.resize(static_cast<std::size_t>(spec.zw_size));
        for (auto& row : per_y) {
          row.resize(static_cast<std::size_t>(zy));
          for (auto& v : row) v = rng.uniform_int(spec.xhat_size);
        }
      }
    }
  }
  return dec;
}

namespace {

nlohmann::json report_to_json(const CostReport& report) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageCost& sc : report.per_stage)
    stages.push_back({{"distortion", sc.distortion},
                      {"length", sc.length},
                      {"cost", sc.cost}});
  return {{"per_stage", std::move(stages)},
          {"total", report.total},
          {"avg_distortion", report.avg_distortion},
          {"avg_length", report.avg_length}};
}

}  // namespace

nlohmann::json search_result_to_json(const SearchResult& result) {
  nlohmann::json doc;
  doc["best_cost"] = result.best_cost;
  doc["candidates_evaluated"] = result.candidates_evaluated;
  doc["report"] = report_to_json(result.report);
  if (result.tracking) doc["encoder"] = encoder_to_json(*result.tracking);
  if (result.full_history)
    doc["encoder"] = encoder_to_json(*result.full_history);
  if (result.infinite) doc["encoder"] = encoder_to_json(*result.infinite);
  if (result.decoder) doc["decoder"] = decoder_to_json(*result.decoder);
  return doc;
}

nlohmann::json theorem_report_to_json(const TheoremReport& report) {
  return {{"name", report.name},   {"lhs", report.lhs},
          {"rhs", report.rhs},     {"slack", report.slack},
          {"holds", report.holds}, {"note", report.note},
          {"details", report.details}};
}

}  // namespace rtcode
