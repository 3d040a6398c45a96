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

#include "bayes_bound/constraints.hpp"

#include "bayes_bound/error.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace bayes_bound {

namespace {
constexpr double kDegenerateRelative = 1e-12;
}

bool HalfSpaceSet::contains(const Eigen::VectorXd& u) const {
  if (forced_empty) return false;
  for (const auto& h : constraints)
    if (!(h.slack(u) > 0.0)) return false;
  return true;
}

double HalfSpaceSet::min_slack(const Eigen::VectorXd& u) const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& h : constraints) s = std::min(s, h.slack(u));
  return s;
}

HalfSpaceSet build_constraints(const GaussianClassModel& model, ClassIndex k, double tau) {
  require(tau > 0.0, "temperature must be positive");
  model.check(k);
  HalfSpaceSet set;
  set.dim = model.dim();
  const double pk = model.priors()(k.value);
  if (pk <= 0.0) {
    // The Bayes rule never selects a class with zero prior.
    set.forced_empty = true;
    return set;
  }

  double scale = model.whitened_means().rowwise().norm().mean();
  if (!(scale > 0.0)) scale = 1.0;

  const Eigen::VectorXd mu_k = model.mean(k);
  for (int j = 0; j < model.num_classes(); ++j) {
    if (j == k.value) continue;
    const double pj = model.priors()(j);
    if (pj <= 0.0) continue;  // log(pi_k / pi_j) = +inf: always satisfied
    const Eigen::VectorXd w = model.whiten(mu_k - model.mean(ClassIndex{j}));
    const double prior_term = 2.0 * tau * std::log(pk / pj);
    if (w.norm() < kDegenerateRelative * scale) {
      // Identical means: class k wins only through its prior, or a tie
      // against a higher index.
      if (prior_term > 0.0 || (prior_term == 0.0 && j > k.value)) continue;
      set.constraints.clear();
      set.forced_empty = true;
      return set;
    }
    HalfSpace h;
    h.normal = 2.0 * w;
    h.offset = w.squaredNorm() / tau + prior_term;
    set.constraints.push_back(std::move(h));
  }
  return set;
}

HalfSpaceSet reduce_dimension(const HalfSpaceSet& set, Eigen::MatrixXd* basis) {
  if (set.forced_empty || set.constraints.empty()) {
    HalfSpaceSet out;
    out.forced_empty = set.forced_empty;
    out.dim = 0;
    if (basis) *basis = Eigen::MatrixXd(set.dim, 0);
    return out;
  }
  const auto m = static_cast<Eigen::Index>(set.constraints.size());
  Eigen::MatrixXd normals(set.dim, m);
  for (Eigen::Index i = 0; i < m; ++i) normals.col(i) = set.constraints[i].normal;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normals);
  const Eigen::Index rank = std::max<Eigen::Index>(1, qr.rank());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(set.dim, rank);

  HalfSpaceSet out;
  out.dim = static_cast<int>(rank);
  out.constraints.reserve(set.constraints.size());
  for (const auto& h : set.constraints) out.constraints.push_back({q.transpose() * h.normal, h.offset});
  if (basis) *basis = q;
  return out;
}

HalfSpaceSet normalize(const HalfSpaceSet& set) {
  HalfSpaceSet out = set;
  for (auto& h : out.constraints) {
    const double n = h.normal.norm();
    h.normal /= n;
    h.offset /= n;
  }
  return out;
}

HalfSpaceSet complement(const HalfSpaceSet& set) {
  require(!set.forced_empty && set.constraints.size() == 1, "complement needs exactly one half-space");
  HalfSpaceSet out = set;
  out.constraints[0].normal = -set.constraints[0].normal;
  out.constraints[0].offset = -set.constraints[0].offset;
  return out;
}

}  // namespace bayes_bound
