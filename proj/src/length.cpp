#include "rtcode/length.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace rtcode {

namespace {

std::vector<int> support_of(const Vec& dist) {
  std::vector<int> support;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] > 0.0) support.push_back(static_cast<int>(i));
  return support;
}

}  // namespace

LengthFunction huffman_expected_length(const Vec& dist) {
  check_probability_vector(dist, "huffman_expected_length");
  const auto support = support_of(dist);
  if (support.empty())
    throw SpecError("huffman_expected_length: empty support");

  LengthFunction out;
  out.lengths.assign(dist.size(), kInfiniteLength);

  const double maxp = dist[*std::max_element(
      support.begin(), support.end(),
      [&](int a, int b) { return dist[a] < dist[b]; })];
  if (support.size() == 1 || maxp >= 1.0) {
    int top = support[0];
    for (int i : support)
      if (dist[i] > dist[top]) top = i;
    out.lengths[top] = 0;
    out.expected_length = 0.0;
    return out;
  }

  // Tree nodes; leaves first. min_sym makes merges deterministic.
  struct Node {
    double weight;
    int min_sym;
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * support.size());
  for (int i : support) nodes.push_back({dist[i], i});

  auto cmp = [&](int a, int b) {
    if (nodes[a].weight != nodes[b].weight)
      return nodes[a].weight > nodes[b].weight;
    return nodes[a].min_sym > nodes[b].min_sym;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) heap.push(i);

  while (heap.size() > 1) {
    int a = heap.top();
    heap.pop();
    int b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].weight + nodes[b].weight,
                     std::min(nodes[a].min_sym, nodes[b].min_sym), a, b});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }

  // Iterative depth assignment from the root.
  std::vector<std::pair<int, int>> stack{{heap.top(), 0}};
  std::vector<int> depth(nodes.size(), 0);
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    depth[idx] = d;
    if (nodes[idx].left >= 0) {
      stack.push_back({nodes[idx].left, d + 1});
      stack.push_back({nodes[idx].right, d + 1});
    }
  }
  for (std::size_t k = 0; k < support.size(); ++k)
    out.lengths[support[k]] = depth[k];

  double expected = 0.0;
  for (int i : support) expected += dist[i] * out.lengths[i];
  out.expected_length = expected;
  return out;
}

double conditional_expected_length(const Mat& joint_zy) {
  double total = 0.0;
  for (const auto& row : joint_zy)
    for (double v : row) {
      if (!(v >= 0.0))
        throw SpecError("conditional_expected_length: negative entry");
      total += v;
    }
  if (std::abs(total - 1.0) > kValidateTol)
    throw SpecError("conditional_expected_length: table sum != 1");

  double result = 0.0;
  for (const auto& row : joint_zy) {
    double pz = 0.0;
    for (double v : row) pz += v;
    if (pz <= 0.0) continue;
    Vec cond(row.size());
    for (std::size_t y = 0; y < row.size(); ++y) cond[y] = row[y] / pz;
    result += pz * huffman_expected_length(cond).expected_length;
  }
  return result;
}

namespace {

// Depth-first search over length assignments on the support, in units of
// 2^-(n) so Kraft is exact in integer arithmetic.
void oracle_rec(const Vec& probs, std::size_t idx, int n,
                unsigned long long kraft_used, double cost, double& best) {
  if (cost >= best) return;
  if (idx == probs.size()) {
    best = cost;
    return;
  }
  const unsigned long long budget = 1ULL << n;
  const auto remaining =
      static_cast<unsigned long long>(probs.size() - idx);
  for (int l = 1; l <= n; ++l) {
    unsigned long long w = 1ULL << (n - l);
    // Every remaining item needs weight >= 1.
    if (kraft_used + w + (remaining - 1) > budget) continue;
    oracle_rec(probs, idx + 1, n, kraft_used + w, cost + probs[idx] * l,
               best);
  }
}

}  // namespace

double oracle_min_expected_length(const Vec& dist) {
  check_probability_vector(dist, "oracle_min_expected_length");
  const auto support = support_of(dist);
  if (support.empty())
    throw SpecError("oracle_min_expected_length: empty support");
  if (support.size() > 8)
    throw SpecError("oracle_min_expected_length: support larger than 8");
  if (support.size() == 1) return 0.0;

  Vec probs;
  probs.reserve(support.size());
  for (int i : support) probs.push_back(dist[i]);
  // Descending probabilities tighten the cost bound early.
  std::sort(probs.begin(), probs.end(), std::greater<>());

  double best = std::numeric_limits<double>::infinity();
  oracle_rec(probs, 0, static_cast<int>(probs.size()), 0, 0.0, best);
  return best;
}

bool kraft_check(const std::vector<int>& lengths) {
  int max_len = 0;
  for (int l : lengths) {
    if (l == kInfiniteLength) continue;
    if (l < 0) throw SpecError("kraft_check: negative length");
    max_len = std::max(max_len, l);
  }
  if (max_len <= 62) {
    unsigned __int128 used = 0;
    const unsigned __int128 budget = static_cast<unsigned __int128>(1)
                                     << max_len;
    for (int l : lengths)
      if (l != kInfiniteLength)
        used += static_cast<unsigned __int128>(1) << (max_len - l);
    return used <= budget;
  }
  long double sum = 0.0L;
  for (int l : lengths)
    if (l != kInfiniteLength) sum += std::exp2(-static_cast<long double>(l));
  return sum <= 1.0L + 1e-15L;
}

}  // namespace rtcode
