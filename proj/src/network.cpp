#include "flowgame/network.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "flowgame/errors.hpp"

namespace flowgame {

namespace {

std::string hop_name(int tail, int head) {
  return std::to_string(tail) + "->" + std::to_string(head);
}

// Resolves one path declaration to a 0-based edge-index list and checks that
// it is a connected walk starting at `source` (all ids in spec are 1-based).
std::vector<int> resolve_path(const NetworkSpec& spec, const PathSpec& path,
                              int dm, int source) {
  const int L = static_cast<int>(spec.edges.size());
  std::vector<int> edges;

  if (!path.nodes.empty() && !path.edges.empty()) {
    throw InputError("path of DM " + std::to_string(dm + 1) +
                     ": give either a node sequence or edge indices, not both");
  }
  if (path.nodes.empty() && path.edges.empty()) {
    throw InputError("path of DM " + std::to_string(dm + 1) + ": empty path");
  }

  if (!path.nodes.empty()) {
    if (path.nodes.size() < 2) {
      throw InputError("path of DM " + std::to_string(dm + 1) +
                       ": a node sequence needs at least two nodes");
    }
    for (int node : path.nodes) {
      if (node < 1 || node > spec.num_nodes) {
        throw InputError("path of DM " + std::to_string(dm + 1) +
                         ": nonexistent node " + std::to_string(node));
      }
    }
    for (std::size_t j = 0; j + 1 < path.nodes.size(); ++j) {
      const int tail = path.nodes[j];
      const int head = path.nodes[j + 1];
      int found = -1;
      int matches = 0;
      for (int l = 0; l < L; ++l) {
        if (spec.edges[l].first == tail && spec.edges[l].second == head) {
          found = l;
          ++matches;
        }
      }
      if (matches == 0) {
        throw InputError("path of DM " + std::to_string(dm + 1) +
                         ": no edge " + hop_name(tail, head));
      }
      if (matches > 1) {
        throw InputError("path of DM " + std::to_string(dm + 1) +
                         ": parallel edges on hop " + hop_name(tail, head) +
                         ", declare this path by edge indices");
      }
      edges.push_back(found);
    }
  } else {
    for (int e : path.edges) {
      if (e < 1 || e > L) {
        throw InputError("path of DM " + std::to_string(dm + 1) +
                         ": nonexistent edge index " + std::to_string(e));
      }
      edges.push_back(e - 1);
    }
  }

  // Walk connectivity and the start-at-source requirement.
  if (spec.edges[edges.front()].first != source) {
    throw InputError("path of DM " + std::to_string(dm + 1) +
                     ": does not start at source node " +
                     std::to_string(source));
  }
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    if (spec.edges[edges[j]].second != spec.edges[edges[j + 1]].first) {
      throw InputError("path of DM " + std::to_string(dm + 1) +
                       ": edges " + std::to_string(edges[j] + 1) + " and " +
                       std::to_string(edges[j + 1] + 1) +
                       " are not consecutive");
    }
  }

  // sigma is an indicator, so a path may not traverse an edge twice.
  std::set<int> distinct(edges.begin(), edges.end());
  if (distinct.size() != edges.size()) {
    throw InputError("path of DM " + std::to_string(dm + 1) +
                     ": repeats an edge");
  }
  return edges;
}

}  // namespace

Network build_network(const NetworkSpec& spec) {
  if (spec.num_nodes < 2) {
    throw InputError("network: need at least two nodes");
  }
  if (spec.edges.empty()) {
    throw InputError("network: empty edge list");
  }
  for (const auto& [tail, head] : spec.edges) {
    if (tail < 1 || tail > spec.num_nodes || head < 1 ||
        head > spec.num_nodes) {
      throw InputError("network: edge endpoint out of range in " +
                       hop_name(tail, head));
    }
  }
  const int num_sources = static_cast<int>(spec.sources.size());
  if (num_sources < 1) {
    throw InputError("network: need at least one source");
  }
  if (num_sources >= spec.num_nodes) {
    throw InputError("network: sources must be fewer than nodes");
  }
  if (spec.paths.size() != spec.sources.size()) {
    throw InputError("network: need exactly one path list per source");
  }

  Network net;
  net.num_nodes_ = spec.num_nodes;
  net.edges_.reserve(spec.edges.size());
  for (const auto& [tail, head] : spec.edges) {
    net.edges_.emplace_back(tail - 1, head - 1);
  }

  int destination = -1;  // 1-based while validating
  for (int i = 0; i < num_sources; ++i) {
    const SourceSpec& src = spec.sources[i];
    if (src.node < 1 || src.node > spec.num_nodes) {
      throw InputError("network: source node " + std::to_string(src.node) +
                       " out of range");
    }
    if (!(src.demand > 0.0)) {
      throw InputError("network: demand of DM " + std::to_string(i + 1) +
                       " must be positive");
    }
    if (spec.paths[i].empty()) {
      throw InputError("network: DM " + std::to_string(i + 1) +
                       " has no paths");
    }
    net.source_nodes_.push_back(src.node - 1);
    net.demands_.push_back(src.demand);

    std::vector<std::vector<int>> dm_paths;
    for (const PathSpec& p : spec.paths[i]) {
      std::vector<int> edges = resolve_path(spec, p, i, src.node);
      const int terminal = spec.edges[edges.back()].second;
      if (destination == -1) {
        destination = terminal;
      } else if (terminal != destination) {
        throw InputError("network: paths end at different nodes (" +
                         std::to_string(destination) + " vs " +
                         std::to_string(terminal) + ")");
      }
      dm_paths.push_back(std::move(edges));
    }
    net.paths_.push_back(std::move(dm_paths));
  }

  for (const SourceSpec& src : spec.sources) {
    if (src.node == destination) {
      throw InputError("network: destination coincides with a source node");
    }
  }
  net.destination_ = destination - 1;

  net.offsets_.resize(num_sources);
  int total = 0;
  for (int i = 0; i < num_sources; ++i) {
    net.offsets_[i] = total;
    total += net.num_paths(i);
  }
  net.total_paths_ = total;

  const int L = net.num_edges();
  net.incidence_ = Eigen::MatrixXd::Zero(L, total);
  net.omega_.assign(num_sources, std::vector<char>(L, 0));
  for (int i = 0; i < num_sources; ++i) {
    for (int k = 0; k < net.num_paths(i); ++k) {
      const int col = net.offsets_[i] + k;
      for (int l : net.paths_[i][k]) {
        net.incidence_(l, col) = 1.0;
        net.omega_[i][l] = 1;
      }
    }
  }
  return net;
}

Eigen::VectorXd edge_flows(const Network& net, const FlowProfile& u) {
  if (u.values.size() != net.total_paths()) {
    throw InputError("edge_flows: profile has dimension " +
                     std::to_string(u.values.size()) + ", expected " +
                     std::to_string(net.total_paths()));
  }
  return net.incidence() * u.values;
}

bool validate_profile(const Network& net, const FlowProfile& u, double tol) {
  if (u.values.size() != net.total_paths()) {
    return false;
  }
  for (int i = 0; i < net.num_dms(); ++i) {
    const auto block = u.values.segment(net.block_offset(i), net.num_paths(i));
    if (block.minCoeff() < -tol) {
      return false;
    }
    if (std::abs(block.sum() - net.demand(i)) > tol) {
      return false;
    }
  }
  return true;
}

FlowProfile uniform_profile(const Network& net) {
  FlowProfile u;
  u.values.resize(net.total_paths());
  for (int i = 0; i < net.num_dms(); ++i) {
    u.values.segment(net.block_offset(i), net.num_paths(i))
        .setConstant(net.demand(i) / net.num_paths(i));
  }
  return u;
}

}  // namespace flowgame
