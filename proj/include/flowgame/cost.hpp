#pragma once

#include <Eigen/Dense>

#include "flowgame/network.hpp"

namespace flowgame {

// Edge cost parameters: edge l carries weight rho_l, quadratic transmission
// cost f_l(z) = z^2, and linear unit-flow cost g_l(z) = a_l + b_l z. The
// forms are fixed; only the coefficients vary.
struct CostModel {
  Eigen::VectorXd rho;  // > 0, length L
  Eigen::VectorXd a;    // >= 0, length L
  Eigen::VectorXd b;    // > 0, length L
};

// Throws InputError if lengths or sign constraints are violated.
void validate_cost_model(const Network& net, const CostModel& cm);

// All evaluations below are polynomials in u, well-defined for any real
// profile of matching dimension; feasibility is the caller's concern
// (finite-difference checks step off the simplex on purpose). Everything is
// deterministic double precision and reentrant.

// Team cost C(u) = sum_l rho_l z_l(u)^2.
double team_cost(const Network& net, const CostModel& cm, const FlowProfile& u);

// Selfish payoff C_i(u) = sum_l rho_l y_l^i (a_l + b_l z_l), where y^i is
// DM i's own flow on edge l.
double individual_cost(const Network& net, const CostModel& cm, int dm,
                       const FlowProfile& u);

// Potential-game payoff: the team cost restricted to the edges DM i touches,
// sum_l rho_l omega(l,i) z_l^2.
double potential_payoff(const Network& net, const CostModel& cm, int dm,
                        const FlowProfile& u);

// G(u) = grad C(u) = 2 A' diag(rho) A u.
Eigen::VectorXd team_gradient(const Network& net, const CostModel& cm,
                              const FlowProfile& u);

// F(u) = col{grad_{u_i} C_i}: block (i,k) entry
// sum_l rho_l sigma(l,k,i) [a_l + b_l z_l + b_l y_l^i].
Eigen::VectorXd pseudo_gradient(const Network& net, const CostModel& cm,
                                const FlowProfile& u);

// F~(u) = col{grad_{u_i} of the potential payoff}. Computed from the
// edge-restricted form, not by delegating to team_gradient; the entrywise
// equality F~ == G is a tested identity, not a shortcut.
Eigen::VectorXd potential_pseudo_gradient(const Network& net,
                                          const CostModel& cm,
                                          const FlowProfile& u);

// theta(u) = G(u) - F(u); affine in u for this cost family.
Eigen::VectorXd perturbation(const Network& net, const CostModel& cm,
                             const FlowProfile& u);

// Constant Jacobian of G: 2 A' diag(rho) A.
Eigen::MatrixXd team_hessian(const Network& net, const CostModel& cm);

// Constant Jacobian of F: A' diag(rho.*b) A + blockdiag_i(A_i' diag(rho.*b) A_i).
Eigen::MatrixXd game_jacobian(const Network& net, const CostModel& cm);

}  // namespace flowgame
