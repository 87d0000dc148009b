#pragma once

#include <Eigen/Dense>

#include "flowgame/network.hpp"

namespace flowgame {

// Euclidean nearest point of v on the scaled simplex {x >= 0, sum x = r}.
// Sort-then-threshold, O(P log P); deterministic (stable sort, standard
// water-filling tie rule). Throws InputError on empty input or r <= 0.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double r);

// Block-wise projection of a raw vector onto the joint strategy set: block i
// is projected onto the simplex scaled by demand(i).
FlowProfile project_profile(const Network& net, const Eigen::VectorXd& raw);

}  // namespace flowgame
