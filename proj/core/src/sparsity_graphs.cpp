#include "rsc/sparsity_graphs.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace rsc {

bool SparsityPattern::has_edge(int i, int j) const {
  if (i == j) return true;  // diagonal is implicit
  if (i > j) std::swap(i, j);
  return edges.count({i, j}) > 0;
}

SparsityPattern SparsityPattern::complete(int p) {
  SparsityPattern g{p, {}};
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j) g.edges.insert({i, j});
  return g;
}

SparsityPattern SparsityPattern::diagonal(int p) { return SparsityPattern{p, {}}; }

std::string SparsityPattern::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : edges) j["edges"].push_back({a, b});
  return j.dump();
}

SparsityPattern SparsityPattern::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SparsityPattern g;
  g.p = j.at("p").get<int>();
  for (const auto& e : j.at("edges")) {
    int a = e.at(0).get<int>();
    int b = e.at(1).get<int>();
    if (a == b || a < 1 || b < 1 || a > g.p || b > g.p)
      throw ParseError("invalid edge in pattern JSON");
    if (a > b) std::swap(a, b);
    g.edges.insert({a, b});
  }
  return g;
}

SparsityPattern banded_pattern(int p, int d) {
  if (d < 1 || d > p) throw InvalidBandwidth("bandwidth must be in [1, p]");
  SparsityPattern g{p, {}};
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p && j - i < d; ++j) g.edges.insert({i, j});
  return g;
}

SparsityPattern grid_pattern(int rows, int cols) {
  if (rows < 2 || cols < 2) throw InvalidSize("grid requires rows, cols >= 2");
  SparsityPattern g{rows * cols, {}};
  auto id = [cols](int r, int c) { return r * cols + c + 1; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.edges.insert({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) g.edges.insert({std::min(id(r, c), id(r + 1, c)),
                                        std::max(id(r, c), id(r + 1, c))});
    }
  }
  return g;
}

namespace {

std::vector<std::vector<int>> adjacency(const SparsityPattern& g) {
  std::vector<std::vector<int>> adj(g.p + 1);
  for (const auto& [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

}  // namespace

bool verify_perfect_order(const SparsityPattern& g, const EliminationOrder& ord) {
  std::vector<int> position(g.p + 1, 0);
  for (int k = 0; k < g.p; ++k) position[ord.order[k]] = k;
  auto adj = adjacency(g);
  for (int k = 0; k < g.p; ++k) {
    int v = ord.order[k];
    std::vector<int> later;
    for (int u : adj[v])
      if (position[u] > k) later.push_back(u);
    for (size_t a = 0; a < later.size(); ++a)
      for (size_t b = a + 1; b < later.size(); ++b)
        if (!g.has_edge(later[a], later[b])) return false;
  }
  return true;
}

std::optional<EliminationOrder> find_perfect_elimination_order(const SparsityPattern& g) {
  const int p = g.p;
  auto adj = adjacency(g);
  // Maximum cardinality search produces a reversed perfect elimination
  // order iff the graph is chordal; ties go to the lowest vertex index.
  std::vector<int> weight(p + 1, 0);
  std::vector<bool> numbered(p + 1, false);
  std::vector<int> mcs;
  mcs.reserve(p);
  for (int step = 0; step < p; ++step) {
    int best = -1;
    for (int v = 1; v <= p; ++v)
      if (!numbered[v] && (best == -1 || weight[v] > weight[best])) best = v;
    numbered[best] = true;
    mcs.push_back(best);
    for (int u : adj[best])
      if (!numbered[u]) ++weight[u];
  }
  EliminationOrder ord;
  ord.order.assign(mcs.rbegin(), mcs.rend());
  // The search is only a candidate generator; the verification pass is
  // the ground truth for chordality.
  if (!verify_perfect_order(g, ord)) return std::nullopt;
  return ord;
}

bool is_g_sparse(const Eigen::MatrixXd& m, const SparsityPattern& g, double tol) {
  if (m.rows() != g.p || m.cols() != g.p)
    throw DimensionMismatch("matrix size does not match pattern");
  for (int i = 1; i <= g.p; ++i)
    for (int j = i + 1; j <= g.p; ++j)
      if (!g.has_edge(i, j) &&
          (std::abs(m(i - 1, j - 1)) > tol || std::abs(m(j - 1, i - 1)) > tol))
        return false;
  return true;
}

SparsityPattern permute_pattern(const SparsityPattern& g, const EliminationOrder& ord) {
  if (static_cast<int>(ord.order.size()) != g.p)
    throw InvalidPermutation("order length does not match vertex count");
  std::vector<int> new_label(g.p + 1, 0);
  std::vector<bool> seen(g.p + 1, false);
  for (int k = 0; k < g.p; ++k) {
    int v = ord.order[k];
    if (v < 1 || v > g.p || seen[v]) throw InvalidPermutation("order is not a permutation");
    seen[v] = true;
    new_label[v] = k + 1;
  }
  SparsityPattern out{g.p, {}};
  for (const auto& [a, b] : g.edges) {
    int na = new_label[a], nb = new_label[b];
    out.edges.insert({std::min(na, nb), std::max(na, nb)});
  }
  return out;
}

}  // namespace rsc
