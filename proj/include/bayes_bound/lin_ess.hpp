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

#ifndef BAYES_BOUND_LIN_ESS_HPP
#define BAYES_BOUND_LIN_ESS_HPP

#include "bayes_bound/constraints.hpp"
#include "bayes_bound/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace bayes_bound {

struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sorted, disjoint sub-intervals of [0, 2pi). An arc through angle 0 shows
/// up as a first interval starting at 0 and a last one ending at 2pi.
struct AngleIntervalSet {
  std::vector<AngleInterval> intervals;
  double total_measure = 0.0;

  bool empty() const { return intervals.empty(); }
  /// theta is reduced mod 2pi first.
  bool contains(double theta) const;
};

struct EssDiagnostics {
  std::uint64_t steps = 0;
  std::uint64_t degenerate_steps = 0;
};

/// Exact, rejection-free elliptical slice sampler for N(0, I) restricted to
/// { u : A u + c + shift > 0 }. The shift relaxes every constraint uniformly;
/// the multilevel estimator uses it for its nested events.
class LinearEllipticalSlice {
 public:
  explicit LinearEllipticalSlice(const HalfSpaceSet& set);

  int dim() const { return static_cast<int>(normals_.cols()); }
  std::size_t num_constraints() const { return static_cast<std::size_t>(normals_.rows()); }

  void set_shift(double shift) { shift_ = shift; }
  double shift() const { return shift_; }

  /// Angles theta for which x cos(theta) + v sin(theta) satisfies every
  /// (shifted) constraint. Requires x strictly inside. An empty result means
  /// the geometry collapsed numerically.
  AngleIntervalSet active_intervals(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;

  /// One Markov step in place. Leaves the truncated normal invariant.
  void step(Eigen::VectorXd& x, Rng& rng, EssDiagnostics* diag = nullptr) const;

 private:
  Eigen::MatrixXd normals_;  // m x r
  Eigen::VectorXd offsets_;
  double shift_ = 0.0;
};

/// Free-function forms over a HalfSpaceSet (no shift).
AngleIntervalSet active_intervals(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const HalfSpaceSet& set);
Eigen::VectorXd ess_step(const Eigen::VectorXd& x, const HalfSpaceSet& set, Rng& rng,
                         EssDiagnostics* diag = nullptr);

}  // namespace bayes_bound

#endif
