#ifndef RSC_SPARSITY_GRAPHS_HPP
#define RSC_SPARSITY_GRAPHS_HPP

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rsc/errors.hpp"

namespace rsc {

/// Undirected graph on vertices 1..p encoding the allowed off-diagonal
/// nonzeros of a concentration matrix.  Edges stored as (i,j) with i<j,
/// 1-based, no self loops.
struct SparsityPattern {
  int p = 0;
  std::set<std::pair<int, int>> edges;

  bool has_edge(int i, int j) const;
  static SparsityPattern complete(int p);
  static SparsityPattern diagonal(int p);

  std::string to_json() const;
  static SparsityPattern from_json(const std::string& text);

  bool operator==(const SparsityPattern&) const = default;
};

/// Permutation of {1..p}; order[k] is the vertex eliminated k-th.
struct EliminationOrder {
  std::vector<int> order;
};

/// Band pattern: (i,j) in E iff 0 < |i-j| < d.
SparsityPattern banded_pattern(int p, int d);

/// rows x cols grid, vertices numbered row-major from 1, edges between
/// horizontal and vertical neighbors.
SparsityPattern grid_pattern(int rows, int cols);

/// Maximum cardinality search followed by an explicit perfect-order
/// verification pass.  Returns nullopt when the graph is not chordal.
/// Ties in the search are broken toward the lowest vertex index.
std::optional<EliminationOrder> find_perfect_elimination_order(const SparsityPattern& g);

/// True when for each vertex v = ord[k], the later neighbors
/// Adj(v) /\ {ord[k+1], ...} form a clique in g.
bool verify_perfect_order(const SparsityPattern& g, const EliminationOrder& ord);

/// True iff |m(i,j)| <= tol for every off-diagonal (i,j) not in E.
bool is_g_sparse(const Eigen::MatrixXd& m, const SparsityPattern& g, double tol = 1e-9);

/// Relabel vertices so that ord becomes the natural order 1..p.
SparsityPattern permute_pattern(const SparsityPattern& g, const EliminationOrder& ord);

}  // namespace rsc

#endif  // RSC_SPARSITY_GRAPHS_HPP
