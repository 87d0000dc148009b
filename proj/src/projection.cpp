#include "flowgame/projection.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "flowgame/errors.hpp"

namespace flowgame {

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double r) {
  const int n = static_cast<int>(v.size());
  if (n == 0) {
    throw InputError("project_simplex: empty input");
  }
  if (!(r > 0.0)) {
    throw InputError("project_simplex: target sum must be positive");
  }

  std::vector<double> w(v.data(), v.data() + n);
  std::stable_sort(w.begin(), w.end(), std::greater<double>());

  // Largest k with w_k - (sum_{j<=k} w_j - r)/k > 0 gives the threshold.
  double cumulative = 0.0;
  double tau = (w[0] - r);  // replaced on the first pass below
  for (int k = 0; k < n; ++k) {
    cumulative += w[k];
    const double t = (cumulative - r) / static_cast<double>(k + 1);
    if (w[k] - t > 0.0) {
      tau = t;
    } else {
      break;
    }
  }
  return (v.array() - tau).cwiseMax(0.0);
}

FlowProfile project_profile(const Network& net, const Eigen::VectorXd& raw) {
  if (raw.size() != net.total_paths()) {
    throw InputError("project_profile: raw vector has dimension " +
                     std::to_string(raw.size()) + ", expected " +
                     std::to_string(net.total_paths()));
  }
  FlowProfile u;
  u.values.resize(raw.size());
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    u.values.segment(off, p) =
        project_simplex(raw.segment(off, p), net.demand(i));
  }
  return u;
}

}  // namespace flowgame
