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

#include "bayes_bound/hdr.hpp"

#include "bayes_bound/error.hpp"
#include "bayes_bound/lin_ess.hpp"
#include "bayes_bound/normal.hpp"
#include "bayes_bound/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bayes_bound {

void HdrConfig::validate() const {
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(n_per_level >= 16, "n_per_level must be at least 16");
  require(repeats >= 1, "repeats must be at least 1");
  require(max_levels >= 1, "max_levels must be at least 1");
}

std::size_t HdrEstimate::levels_total() const { return std::accumulate(levels.begin(), levels.end(), std::size_t{0}); }

namespace {

struct Population {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> stat;
};

double statistic(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets, const Eigen::VectorXd& u) {
  return ((normals * u) + offsets).minCoeff();
}

}  // namespace

HdrRun run_hdr(const HalfSpaceSet& unit_set, const HdrConfig& config, Rng& rng) {
  const int r = unit_set.dim;
  const auto m = static_cast<Eigen::Index>(unit_set.constraints.size());
  Eigen::MatrixXd normals(m, r);
  Eigen::VectorXd offsets(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    normals.row(i) = unit_set.constraints[i].normal.transpose();
    offsets(i) = unit_set.constraints[i].offset;
  }
  const std::size_t n = config.n_per_level;
  const std::size_t thin = config.thin > 0 ? config.thin : static_cast<std::size_t>(r);
  const std::size_t burn_in = config.burn_in > 0 ? config.burn_in : 4 * static_cast<std::size_t>(r);
  // Number of samples that stay above each intermediate threshold.
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(config.rho * n)), 1, n - 1);

  LinearEllipticalSlice sampler(unit_set);
  EssDiagnostics diag;
  HdrRun run;

  Population pop;
  pop.points.reserve(n);
  pop.stat.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop.points.push_back(rng.normal_vector(r));
    pop.stat.push_back(statistic(normals, offsets, pop.points.back()));
  }

  std::vector<double> sorted;
  double shift = 0.0;
  while (true) {
    ++run.levels;
    if (run.levels > config.max_levels) fail(ErrorKind::numerical, "nesting failed to reach zero");

    sorted = pop.stat;
    const std::size_t below = n - keep;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(below), sorted.end());
    const double upper = sorted[below];
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(below));
    // Midpoint of the order statistics around the cut.
    const double threshold = 0.5 * (lower + upper);
    const bool final_level = threshold >= 0.0;
    const double level = final_level ? 0.0 : threshold;

    std::size_t survivors = 0;
    for (double s : pop.stat)
      if (s > level) ++survivors;
    if (survivors == 0) {
      run.log_p = -std::numeric_limits<double>::infinity();
      break;
    }
    run.log_p += std::log(static_cast<double>(survivors) / static_cast<double>(n));
    if (final_level) break;

    // Repopulate { s > level } with chains started at the survivors.
    shift = -level;
    sampler.set_shift(shift);
    std::vector<Eigen::VectorXd> chains;
    chains.reserve(survivors);
    for (std::size_t i = 0; i < n; ++i)
      if (pop.stat[i] > level) chains.push_back(std::move(pop.points[i]));
    for (auto& x : chains)
      for (std::size_t t = 0; t < burn_in; ++t) sampler.step(x, rng, &diag);
    pop.points.clear();
    pop.stat.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto& x = chains[i % chains.size()];
      for (std::size_t t = 0; t < thin; ++t) sampler.step(x, rng, &diag);
      pop.points.push_back(x);
      pop.stat.push_back(statistic(normals, offsets, x));
    }
  }
  run.degenerate_steps = diag.degenerate_steps;
  return run;
}

HdrEstimate aggregate_runs(std::span<const HdrRun> runs) {
  HdrEstimate est;
  const auto count = static_cast<double>(runs.size());
  std::vector<double> logs;
  logs.reserve(runs.size());
  for (const auto& r : runs) {
    logs.push_back(r.log_p);
    est.levels.push_back(r.levels);
    est.degenerate_steps += r.degenerate_steps;
  }
  est.log_p = log_sum_exp(logs) - std::log(count);
  est.p = std::exp(est.log_p);
  if (runs.size() > 1) {
    double var_p = 0.0;
    for (double l : logs) var_p += std::pow(std::exp(l) - est.p, 2);
    est.std_error = std::sqrt(var_p / (count - 1.0) / count);
    if (std::all_of(logs.begin(), logs.end(), [](double l) { return std::isfinite(l); })) {
      const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) / count;
      double var_log = 0.0;
      for (double l : logs) var_log += (l - mean_log) * (l - mean_log);
      est.std_error_log = std::sqrt(var_log / (count - 1.0) / count);
    } else {
      est.std_error_log = std::numeric_limits<double>::infinity();
    }
  }
  return est;
}

HdrEstimate estimate_polytope_probability(const HalfSpaceSet& set, const HdrConfig& config, std::uint64_t stream) {
  config.validate();
  HdrEstimate est;
  if (set.forced_empty) {
    est.p = 0.0;
    est.log_p = -std::numeric_limits<double>::infinity();
    return est;
  }
  if (set.constraints.empty()) {
    est.p = 1.0;
    est.log_p = 0.0;
    return est;
  }
  const HalfSpaceSet unit = normalize(set);
  std::vector<HdrRun> runs(config.repeats);
  parallel_for(config.repeats, config.threads, [&](std::size_t rep) {
    Rng rng(hdr_repeat_seed(config, stream, rep));
    runs[rep] = run_hdr(unit, config, rng);
  });
  return aggregate_runs(runs);
}

McProbability mc_polytope_probability(const HalfSpaceSet& set, std::uint64_t n, std::uint64_t seed) {
  require(n >= 1, "sample count must be positive");
  if (set.forced_empty) return {0.0, 0.0};
  if (set.constraints.empty()) return {1.0, 0.0};
  Rng rng(derive_seed(seed, {0x3c}));
  Eigen::VectorXd u(set.dim);
  std::uint64_t inside = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    rng.fill_normal(u);
    if (set.contains(u)) ++inside;
  }
  const double p = static_cast<double>(inside) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace bayes_bound
