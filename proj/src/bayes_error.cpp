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

#include "bayes_bound/bayes_error.hpp"

#include "bayes_bound/constraints.hpp"
#include "bayes_bound/error.hpp"
#include "bayes_bound/normal.hpp"
#include "bayes_bound/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bayes_bound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMcChunk = std::uint64_t{1} << 16;

bool uniform_priors(const GaussianClassModel& model) {
  const auto& p = model.priors();
  return (p.array() - p.mean()).abs().maxCoeff() <= 1e-12;
}

bool binary_uniform(const GaussianClassModel& model) {
  return model.num_classes() == 2 && uniform_priors(model);
}

void finish(BayesErrorEstimate& est, const GaussianClassModel& model) {
  std::vector<double> logs;
  double var = 0.0;
  for (int k = 0; k < model.num_classes(); ++k) {
    const double pk = model.priors()(k);
    const ClassTerm& term = est.per_class[k];
    var += pk * pk * term.std_error * term.std_error;
    if (pk > 0.0) logs.push_back(std::log(pk) + term.log_miss);
  }
  est.log_error = log_sum_exp(logs);
  est.error = std::exp(est.log_error);
  est.std_error = std::sqrt(var);
}

struct ClassJob {
  HalfSpaceSet unit_set;  // reduced, unit normals; empty when no sampling is needed
  bool sample = false;
};

std::vector<std::uint64_t> mc_chunks(std::uint64_t n) {
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t done = 0; done < n; done += kMcChunk) sizes.push_back(std::min(kMcChunk, n - done));
  return sizes;
}

}  // namespace

const char* to_string(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::closed_form:
      return "closed_form";
    case EstimateMethod::hdr:
      return "hdr";
    case EstimateMethod::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

std::size_t BayesErrorEstimate::levels_total() const {
  std::size_t total = 0;
  for (const auto& t : per_class) total += t.levels;
  return total;
}

BayesErrorEstimate compute_bayes_error(const GaussianClassModel& model, double tau, const HdrConfig& config) {
  require(tau > 0.0, "temperature must be positive");
  config.validate();
  const int k_count = model.num_classes();

  BayesErrorEstimate est;
  est.tau = tau;
  est.method = EstimateMethod::hdr;
  est.per_class.resize(k_count);

  std::vector<ClassJob> jobs(k_count);
  for (int k = 0; k < k_count; ++k) {
    const HalfSpaceSet full = build_constraints(model, ClassIndex{k}, tau);
    const HalfSpaceSet reduced = reduce_dimension(full);
    ClassTerm& term = est.per_class[k];
    term.num_constraints = reduced.constraints.size();
    term.reduced_dim = reduced.dim;
    if (reduced.forced_empty) {
      term.p = 0.0;
      term.log_miss = 0.0;
    } else if (reduced.constraints.empty()) {
      term.p = 1.0;
      term.log_miss = kNegInf;
    } else if (reduced.constraints.size() == 1) {
      term.via_complement = true;
      jobs[k] = {normalize(complement(reduced)), true};
    } else {
      jobs[k] = {normalize(reduced), true};
    }
  }

  // Flatten (class, repeat) so all runs share the worker budget.
  std::vector<std::pair<int, std::size_t>> tasks;
  for (int k = 0; k < k_count; ++k)
    if (jobs[k].sample)
      for (std::size_t rep = 0; rep < config.repeats; ++rep) tasks.emplace_back(k, rep);
  std::vector<HdrRun> runs(tasks.size());
  try {
    parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
      const auto [k, rep] = tasks[t];
      Rng rng(hdr_repeat_seed(config, static_cast<std::uint64_t>(k), rep));
      runs[t] = run_hdr(jobs[k].unit_set, config, rng);
    });
  } catch (const Error& e) {
    // Name the class whose run failed.
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (runs[t].levels == 0) {
        std::ostringstream msg;
        msg << e.what() << " (class " << tasks[t].first << ")";
        throw Error(e.kind(), msg.str());
      }
    }
    throw;
  }

  std::size_t offset = 0;
  for (int k = 0; k < k_count; ++k) {
    if (!jobs[k].sample) continue;
    const HdrEstimate h = aggregate_runs(std::span<const HdrRun>(runs).subspan(offset, config.repeats));
    offset += config.repeats;
    ClassTerm& term = est.per_class[k];
    term.levels = h.levels_total();
    term.degenerate_steps = h.degenerate_steps;
    term.std_error = h.std_error;
    if (term.via_complement) {
      term.log_miss = h.log_p;
      term.p = 1.0 - h.p;
    } else {
      term.p = h.p;
      term.log_miss = h.p < 1.0 ? std::log1p(-h.p) : kNegInf;
    }
  }
  finish(est, model);
  if (binary_uniform(model)) est.closed_form = binary_closed_form(model, tau);
  return est;
}

BayesErrorEstimate closed_form_bayes_error(const GaussianClassModel& model, double tau) {
  BayesErrorEstimate est;
  est.tau = tau;
  est.method = EstimateMethod::closed_form;
  est.error = binary_closed_form(model, tau);
  est.log_error = binary_closed_form_log(model, tau);
  est.closed_form = est.error;
  est.per_class.assign(2, ClassTerm{});
  for (auto& t : est.per_class) {
    t.p = 1.0 - est.error;
    t.log_miss = est.log_error;
  }
  return est;
}

BayesErrorEstimate monte_carlo_bayes_error(const GaussianClassModel& model, double tau, std::uint64_t n,
                                           std::uint64_t seed, std::size_t threads) {
  require(n >= 1, "sample count must be positive");
  require(tau > 0.0, "temperature must be positive");
  const int k_count = model.num_classes();
  const auto chunks = mc_chunks(n);
  // Per chunk, per class: draws and misclassifications.
  std::vector<std::vector<std::uint64_t>> drawn(chunks.size()), wrong(chunks.size());
  const std::vector<double> weights(model.priors().data(), model.priors().data() + k_count);

  parallel_for(chunks.size(), threads, [&](std::size_t c) {
    Rng rng(derive_seed(seed, {0xb0, c}));
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    drawn[c].assign(k_count, 0);
    wrong[c].assign(k_count, 0);
    for (std::uint64_t i = 0; i < chunks[c]; ++i) {
      const int y = pick(rng.engine());
      const Eigen::VectorXd x = sample(model, ClassIndex{y}, tau, rng);
      ++drawn[c][y];
      if (bayes_classify(model, x, tau).value != y) ++wrong[c][y];
    }
  });

  BayesErrorEstimate est;
  est.tau = tau;
  est.method = EstimateMethod::monte_carlo;
  est.per_class.resize(k_count);
  std::uint64_t total_wrong = 0;
  for (int k = 0; k < k_count; ++k) {
    std::uint64_t dk = 0, wk = 0;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      dk += drawn[c][k];
      wk += wrong[c][k];
    }
    total_wrong += wk;
    ClassTerm& term = est.per_class[k];
    if (dk > 0) {
      const double miss = static_cast<double>(wk) / static_cast<double>(dk);
      term.p = 1.0 - miss;
      term.log_miss = std::log(miss);
      term.std_error = std::sqrt(miss * (1.0 - miss) / static_cast<double>(dk));
    }
  }
  est.error = static_cast<double>(total_wrong) / static_cast<double>(n);
  est.log_error = std::log(est.error);
  est.std_error = std::sqrt(est.error * (1.0 - est.error) / static_cast<double>(n));
  if (binary_uniform(model)) est.closed_form = binary_closed_form(model, tau);
  return est;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t steps) {
  require(lo > 0.0 && hi > lo, "grid needs 0 < lo < hi");
  require(steps >= 2, "grid needs at least two steps");
  std::vector<double> grid(steps);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(steps - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  require(lo > 0.0 && hi > lo, "grid needs 0 < lo < hi");
  require(steps >= 2, "grid needs at least two steps");
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  grid.back() = hi;
  return grid;
}

TemperatureCurve temperature_sweep(const GaussianClassModel& model, std::span<const double> taus,
                                   const HdrConfig& config) {
  require(!taus.empty(), "temperature grid is empty");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    require(taus[i] > 0.0, "temperatures must be positive");
    if (i > 0) require(taus[i] > taus[i - 1], "temperature grid must be strictly increasing");
  }
  TemperatureCurve curve;
  curve.taus.assign(taus.begin(), taus.end());
  for (double tau : taus) curve.estimates.push_back(compute_bayes_error(model, tau, config));
  if (uniform_priors(model)) {
    for (std::size_t i = 1; i < taus.size(); ++i) {
      const auto& a = curve.estimates[i - 1];
      const auto& b = curve.estimates[i];
      const double slack = 3.0 * std::hypot(a.std_error, b.std_error);
      if (b.error < a.error - slack) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "Bayes error decreases from " << a.error << " at tau=" << taus[i - 1] << " to " << b.error
            << " at tau=" << taus[i] << " (beyond 3 combined stderr = " << slack << ")";
        curve.warnings.push_back(msg.str());
      }
    }
  }
  return curve;
}

InversionResult invert_temperature(const GaussianClassModel& model, double target, double tau_lo, double tau_hi,
                                   double tol, const HdrConfig& config, const InversionOptions& options) {
  require(tau_lo > 0.0 && tau_hi > tau_lo, "inversion needs 0 < tau_lo < tau_hi");
  require(tol > 0.0, "tolerance must be positive");
  require(target >= 0.0 && target <= 1.0, "target must lie in [0, 1]");
  InversionResult result;
  HdrConfig cfg = config;

  auto evaluate = [&](double tau) {
    if (result.evaluations >= options.max_evaluations) fail(ErrorKind::numerical, "inversion budget exhausted");
    ++result.evaluations;
    return compute_bayes_error(model, tau, cfg);
  };

  BayesErrorEstimate lo = evaluate(tau_lo);
  BayesErrorEstimate hi = evaluate(tau_hi);
  if (target > 0.0 && target < std::max(lo.std_error, hi.std_error)) {
    cfg.repeats *= 4;
    lo = evaluate(tau_lo);
    hi = evaluate(tau_hi);
    if (target < std::max(lo.std_error, hi.std_error))
      result.warnings.push_back("target is below the standard-error floor of the HDR budget");
  }
  result.repeats_used = cfg.repeats;
  if (target < lo.error - 3.0 * lo.std_error || target > hi.error + 3.0 * hi.std_error) {
    std::ostringstream msg;
    msg << "target outside achievable range [" << lo.error << ", " << hi.error << "] for tau in [" << tau_lo
        << ", " << tau_hi << "]";
    fail(ErrorKind::out_of_range, msg.str());
  }

  double a = tau_lo, b = tau_hi;
  while (true) {
    const double mid = 0.5 * (a + b);
    BayesErrorEstimate e = evaluate(mid);
    const bool close = std::abs(e.error - target) <= std::max(options.tol_error, 2.0 * e.std_error);
    if (e.error < target)
      a = mid;
    else
      b = mid;
    if (close || (b - a) <= tol * mid) {
      result.tau = mid;
      result.estimate = std::move(e);
      return result;
    }
  }
}

McError one_vs_all_error(const GaussianClassModel& model, ClassIndex j, double tau, std::uint64_t n,
                         std::uint64_t seed, OneVsAllWeights weights, std::size_t threads) {
  require(model.num_classes() >= 2, "one-vs-all needs at least two classes");
  require(n >= 1, "sample count must be positive");
  require(tau > 0.0, "temperature must be positive");
  model.check(j);
  const int k_count = model.num_classes();
  const double pj = model.priors()(j.value);
  require(pj < 1.0, "the remaining classes have zero total prior");

  const double w0 = weights == OneVsAllWeights::balanced ? 0.5 : pj;
  const double log_w0 = std::log(w0);
  const double log_w1 = std::log1p(-w0);
  const double log_rest = std::log1p(-pj);

  std::vector<double> rest_weights(k_count);
  for (int i = 0; i < k_count; ++i) rest_weights[i] = i == j.value ? 0.0 : model.priors()(i);

  const auto chunks = mc_chunks(n);
  std::vector<std::uint64_t> wrong(chunks.size(), 0);
  const double inv2 = 0.5 / (tau * tau);
  const Eigen::MatrixXd& wm = model.whitened_means();

  parallel_for(chunks.size(), threads, [&](std::size_t c) {
    Rng rng(derive_seed(seed, {0x0a11, c}));
    std::discrete_distribution<int> pick_rest(rest_weights.begin(), rest_weights.end());
    std::vector<double> terms;
    terms.reserve(k_count);
    for (std::uint64_t s = 0; s < chunks[c]; ++s) {
      const int label = rng.uniform() < w0 ? 0 : 1;
      const int source = label == 0 ? j.value : pick_rest(rng.engine());
      const Eigen::VectorXd x = sample(model, ClassIndex{source}, tau, rng);
      // Class log densities up to their shared normalizer.
      const Eigen::VectorXd wx = model.whiten(x);
      const double log_pj = -inv2 * (wx - wm.row(j.value).transpose()).squaredNorm();
      terms.clear();
      for (int i = 0; i < k_count; ++i) {
        if (i == j.value || rest_weights[i] <= 0.0) continue;
        terms.push_back(std::log(rest_weights[i]) - inv2 * (wx - wm.row(i).transpose()).squaredNorm());
      }
      const double log_mix = log_sum_exp(terms) - log_rest;
      const int predicted = log_w0 + log_pj >= log_w1 + log_mix ? 0 : 1;
      if (predicted != label) ++wrong[c];
    }
  });

  const double total = static_cast<double>(std::accumulate(wrong.begin(), wrong.end(), std::uint64_t{0}));
  const double err = total / static_cast<double>(n);
  return {err, std::sqrt(err * (1.0 - err) / static_cast<double>(n))};
}

}  // namespace bayes_bound
