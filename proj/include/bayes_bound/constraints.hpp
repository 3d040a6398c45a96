/*
 * Copyright 2026 The bayes_bound Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BAYES_BOUND_CONSTRAINTS_HPP
#define BAYES_BOUND_CONSTRAINTS_HPP

#include "bayes_bound/gaussian_model.hpp"

#include <Eigen/Core>

#include <vector>

namespace bayes_bound {

/// The open half-space { u : normal . u + offset > 0 }.
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  double slack(const Eigen::VectorXd& u) const { return normal.dot(u) + offset; }
};

/// Intersection of half-spaces in R^dim, measured under N(0, I_dim).
/// A forced-empty set has no constraints and probability 0.
struct HalfSpaceSet {
  int dim = 0;
  std::vector<HalfSpace> constraints;
  bool forced_empty = false;

  bool contains(const Eigen::VectorXd& u) const;
  /// min over constraints of slack(u); +inf when unconstrained.
  double min_slack(const Eigen::VectorXd& u) const;
};

/// Whitened decision region of class k at temperature tau: u ~ N(0, I) maps to
/// z = mu_k + tau L u, and each j != k contributes
///   2 L^{-1}(mu_k - mu_j) . u + b_jk / tau + 2 tau log(pi_k / pi_j) > 0,
/// with b_jk = |L^{-1}(mu_k - mu_j)|^2. Pairs with coincident means are
/// resolved by the prior offset, then by lowest-index tie-breaking.
HalfSpaceSet build_constraints(const GaussianClassModel& model, ClassIndex k, double tau);

/// Projects the normals onto an orthonormal basis Q of their span (rank-
/// revealing QR with column pivoting). Offsets are unchanged; by isotropy of
/// N(0, I) the probability is too. If `basis` is non-null it receives Q
/// (dim x rank), so that membership of u equals membership of Q^T u.
HalfSpaceSet reduce_dimension(const HalfSpaceSet& set, Eigen::MatrixXd* basis = nullptr);

/// Rescales every constraint to a unit normal. Membership is unchanged.
HalfSpaceSet normalize(const HalfSpaceSet& set);

/// For a single half-space, the complementary half-space (the boundary has
/// measure zero). Requires exactly one constraint.
HalfSpaceSet complement(const HalfSpaceSet& set);

}  // namespace bayes_bound

#endif
