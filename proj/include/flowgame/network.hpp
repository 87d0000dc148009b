#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace flowgame {

// One decision maker: a source node injecting `demand` flow units into the
// network, to be split across its admissible paths.
struct SourceSpec {
  int node = 0;         // 1-based node id, matching the scenario file
  double demand = 0.0;  // flow units, > 0
};

// A path is declared either as a node sequence (resolved against the edge
// list) or as explicit 1-based edge indices. The edge form is required when a
// hop is ambiguous because of parallel edges.
struct PathSpec {
  std::vector<int> nodes;
  std::vector<int> edges;
};

// Raw network description as read from a scenario file; all ids 1-based.
struct NetworkSpec {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // (tail, head)
  std::vector<SourceSpec> sources;
  std::vector<std::vector<PathSpec>> paths;  // one path list per source
};

// Immutable routing network: directed graph, per-DM path lists, and the dense
// path-edge incidence matrix. Indices exposed by this class are 0-based.
// Safe to share read-only across concurrent solver instances.
class Network {
 public:
  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_dms() const { return static_cast<int>(demands_.size()); }
  int num_paths(int dm) const { return static_cast<int>(paths_[dm].size()); }
  int total_paths() const { return total_paths_; }
  int block_offset(int dm) const { return offsets_[dm]; }
  double demand(int dm) const { return demands_[dm]; }
  int source_node(int dm) const { return source_nodes_[dm]; }
  int destination() const { return destination_; }
  std::pair<int, int> edge(int l) const { return edges_[l]; }
  const std::vector<int>& path_edges(int dm, int k) const {
    return paths_[dm][k];
  }

  // L x (sum_i P_i) incidence: entry (l, col(i,k)) is 1 iff edge l lies on
  // path k of DM i. Canonical internal representation of sigma.
  const Eigen::MatrixXd& incidence() const { return incidence_; }

  // omega(l, i): true iff any path of `dm` contains edge l.
  bool dm_uses_edge(int dm, int l) const { return omega_[dm][l] != 0; }

 private:
  friend Network build_network(const NetworkSpec& spec);

  int num_nodes_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> demands_;
  std::vector<int> source_nodes_;
  std::vector<std::vector<std::vector<int>>> paths_;  // [dm][k] -> edge ids
  std::vector<int> offsets_;
  int total_paths_ = 0;
  int destination_ = -1;
  Eigen::MatrixXd incidence_;
  std::vector<std::vector<char>> omega_;  // [dm][edge]
};

// Validates the description and converts node-sequence paths to edge lists.
// Throws InputError on inconsistent input (bad ids, disconnected walks,
// differing terminal nodes, ambiguous parallel hops, ...).
Network build_network(const NetworkSpec& spec);

// Joint allocation u = col{u_i}: block i holds DM i's split of demand(i)
// across its paths, in declaration order.
struct FlowProfile {
  Eigen::VectorXd values;
};

// Total flow per edge, z = A u.
Eigen::VectorXd edge_flows(const Network& net, const FlowProfile& u);

// True iff every block of u lies on its scaled simplex within tol:
// |sum_k u_i^k - r_i| <= tol and u_i^k >= -tol. A profile of the wrong
// dimension is simply infeasible.
bool validate_profile(const Network& net, const FlowProfile& u, double tol);

// Even split of each demand across its paths; the deterministic default
// starting point for the solvers.
FlowProfile uniform_profile(const Network& net);

}  // namespace flowgame
