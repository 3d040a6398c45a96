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

#ifndef BAYES_BOUND_HDR_HPP
#define BAYES_BOUND_HDR_HPP

#include "bayes_bound/constraints.hpp"
#include "bayes_bound/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bayes_bound {

struct HdrConfig {
  std::size_t n_per_level = 512;
  /// Target conditional probability of each nested event.
  double rho = 0.5;
  std::size_t repeats = 8;
  std::size_t max_levels = 200;
  std::uint64_t seed = 0;
  /// Sampler steps between retained draws; 0 means the set's dimension.
  std::size_t thin = 0;
  /// Steps each chain runs after re-seeding at a level; 0 means 4 x dimension.
  std::size_t burn_in = 0;
  /// Parallelism budget for repeats/classes; 0 means all hardware threads.
  std::size_t threads = 1;

  /// Throws Error(invalid_argument) unless 0 < rho < 1, n_per_level >= 16
  /// and repeats >= 1.
  void validate() const;
};

/// Result of one independent multilevel-splitting run.
struct HdrRun {
  double log_p = 0.0;
  std::size_t levels = 0;
  std::uint64_t degenerate_steps = 0;
};

struct HdrEstimate {
  double p = 0.0;
  double log_p = 0.0;
  double std_error = 0.0;      // of p, across repeats
  double std_error_log = 0.0;  // of the per-repeat log p
  std::vector<std::size_t> levels;
  std::uint64_t degenerate_steps = 0;

  std::size_t levels_total() const;
};

/// P(u in set) for u ~ N(0, I) by Holmes-Diaconis-Ross splitting on
/// s(u) = min_i (a_i . u + c_i) / |a_i|. Nested events are { s > -gamma },
/// with gamma >= 0 shrinking to 0 by (1 - rho)-quantiles of the current
/// population; each level after the first is repopulated by elliptical slice
/// chains started from the survivors. `stream` separates independent jobs
/// that share config.seed (e.g. one per class). Forced-empty sets give 0 and
/// unconstrained sets 1 exactly.
HdrEstimate estimate_polytope_probability(const HalfSpaceSet& set, const HdrConfig& config,
                                          std::uint64_t stream = 0);

/// One repeat on a set with unit normals and at least one constraint.
HdrRun run_hdr(const HalfSpaceSet& unit_set, const HdrConfig& config, Rng& rng);

/// Mean of the per-repeat probabilities (computed in log space) and the
/// standard error across repeats.
HdrEstimate aggregate_runs(std::span<const HdrRun> runs);

/// Seed of repeat `repeat` within job `stream`.
inline std::uint64_t hdr_repeat_seed(const HdrConfig& config, std::uint64_t stream, std::uint64_t repeat) {
  return derive_seed(config.seed, {stream, repeat});
}

struct McProbability {
  double p = 0.0;
  double std_error = 0.0;
};

/// Fraction of n i.i.d. N(0, I) draws inside the set, with binomial error.
McProbability mc_polytope_probability(const HalfSpaceSet& set, std::uint64_t n, std::uint64_t seed);

}  // namespace bayes_bound

#endif
