#include "flowgame/cost.hpp"

#include <string>

#include "flowgame/errors.hpp"

namespace flowgame {

namespace {

void check_profile_dim(const Network& net, const FlowProfile& u,
                       const char* where) {
  if (u.values.size() != net.total_paths()) {
    throw InputError(std::string(where) + ": profile has dimension " +
                     std::to_string(u.values.size()) + ", expected " +
                     std::to_string(net.total_paths()));
  }
}

void check_dm(const Network& net, int dm, const char* where) {
  if (dm < 0 || dm >= net.num_dms()) {
    throw InputError(std::string(where) + ": DM index " + std::to_string(dm) +
                     " out of range");
  }
}

// DM i's own flow per edge, y^i = A_i u_i.
Eigen::VectorXd own_edge_flows(const Network& net, int dm,
                               const FlowProfile& u) {
  const int off = net.block_offset(dm);
  const int p = net.num_paths(dm);
  return net.incidence().middleCols(off, p) * u.values.segment(off, p);
}

}  // namespace

void validate_cost_model(const Network& net, const CostModel& cm) {
  const int L = net.num_edges();
  if (cm.rho.size() != L || cm.a.size() != L || cm.b.size() != L) {
    throw InputError("cost model: rho, a, b must all have length " +
                     std::to_string(L));
  }
  for (int l = 0; l < L; ++l) {
    if (!(cm.rho[l] > 0.0)) {
      throw InputError("cost model: rho[" + std::to_string(l + 1) +
                       "] must be positive");
    }
    if (cm.a[l] < 0.0) {
      throw InputError("cost model: a[" + std::to_string(l + 1) +
                       "] must be nonnegative");
    }
    if (!(cm.b[l] > 0.0)) {
      throw InputError("cost model: b[" + std::to_string(l + 1) +
                       "] must be positive");
    }
  }
}

double team_cost(const Network& net, const CostModel& cm,
                 const FlowProfile& u) {
  check_profile_dim(net, u, "team_cost");
  const Eigen::VectorXd z = net.incidence() * u.values;
  return z.dot(cm.rho.cwiseProduct(z));
}

double individual_cost(const Network& net, const CostModel& cm, int dm,
                       const FlowProfile& u) {
  check_dm(net, dm, "individual_cost");
  check_profile_dim(net, u, "individual_cost");
  const Eigen::VectorXd z = net.incidence() * u.values;
  const Eigen::VectorXd own = own_edge_flows(net, dm, u);
  const Eigen::VectorXd g = cm.a + cm.b.cwiseProduct(z);
  return own.dot(cm.rho.cwiseProduct(g));
}

double potential_payoff(const Network& net, const CostModel& cm, int dm,
                        const FlowProfile& u) {
  check_dm(net, dm, "potential_payoff");
  check_profile_dim(net, u, "potential_payoff");
  const Eigen::VectorXd z = net.incidence() * u.values;
  double value = 0.0;
  for (int l = 0; l < net.num_edges(); ++l) {
    if (net.dm_uses_edge(dm, l)) {
      value += cm.rho[l] * z[l] * z[l];
    }
  }
  return value;
}

Eigen::VectorXd team_gradient(const Network& net, const CostModel& cm,
                              const FlowProfile& u) {
  check_profile_dim(net, u, "team_gradient");
  const Eigen::VectorXd z = net.incidence() * u.values;
  return 2.0 * (net.incidence().transpose() * cm.rho.cwiseProduct(z));
}

Eigen::VectorXd pseudo_gradient(const Network& net, const CostModel& cm,
                                const FlowProfile& u) {
  check_profile_dim(net, u, "pseudo_gradient");
  const Eigen::VectorXd z = net.incidence() * u.values;
  Eigen::VectorXd grad(net.total_paths());
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    const Eigen::VectorXd own = own_edge_flows(net, i, u);
    const Eigen::VectorXd w =
        cm.rho.cwiseProduct(cm.a + cm.b.cwiseProduct(z + own));
    grad.segment(off, p) = net.incidence().middleCols(off, p).transpose() * w;
  }
  return grad;
}

Eigen::VectorXd potential_pseudo_gradient(const Network& net,
                                          const CostModel& cm,
                                          const FlowProfile& u) {
  check_profile_dim(net, u, "potential_pseudo_gradient");
  const Eigen::VectorXd z = net.incidence() * u.values;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.total_paths());
  for (int i = 0; i < net.num_dms(); ++i) {
    for (int k = 0; k < net.num_paths(i); ++k) {
      double entry = 0.0;
      for (int l : net.path_edges(i, k)) {
        entry += 2.0 * cm.rho[l] * z[l];
      }
      grad[net.block_offset(i) + k] = entry;
    }
  }
  return grad;
}

Eigen::VectorXd perturbation(const Network& net, const CostModel& cm,
                             const FlowProfile& u) {
  return team_gradient(net, cm, u) - pseudo_gradient(net, cm, u);
}

Eigen::MatrixXd team_hessian(const Network& net, const CostModel& cm) {
  const Eigen::MatrixXd& A = net.incidence();
  return 2.0 * (A.transpose() * cm.rho.asDiagonal() * A);
}

Eigen::MatrixXd game_jacobian(const Network& net, const CostModel& cm) {
  const Eigen::MatrixXd& A = net.incidence();
  const Eigen::VectorXd w = cm.rho.cwiseProduct(cm.b);
  Eigen::MatrixXd jac = A.transpose() * w.asDiagonal() * A;
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    const Eigen::MatrixXd Ai = A.middleCols(off, p);
    jac.block(off, off, p, p) += Ai.transpose() * w.asDiagonal() * Ai;
  }
  return jac;
}

}  // namespace flowgame
