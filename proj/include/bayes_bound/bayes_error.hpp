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

#ifndef BAYES_BOUND_BAYES_ERROR_HPP
#define BAYES_BOUND_BAYES_ERROR_HPP

#include "bayes_bound/gaussian_model.hpp"
#include "bayes_bound/hdr.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bayes_bound {

enum class EstimateMethod { closed_form, hdr, monte_carlo };

const char* to_string(EstimateMethod method);

/// Probability that a class-k draw lands in class k's decision region (p)
/// and its complement (miss = 1 - p, kept separately in log form so tiny
/// misclassification rates survive).
struct ClassTerm {
  double p = 1.0;
  double log_miss = 0.0;
  double std_error = 0.0;
  std::size_t levels = 0;
  std::uint64_t degenerate_steps = 0;
  /// Decision region was a single half-space, so the miss probability was
  /// estimated directly on the flipped half-space.
  bool via_complement = false;
  /// Dimension after projection onto the span of the constraint normals.
  int reduced_dim = 0;
  std::size_t num_constraints = 0;
};

struct BayesErrorEstimate {
  double error = 0.0;
  /// log(error); finite even when error underflows to 0 in double.
  double log_error = 0.0;
  double std_error = 0.0;
  std::vector<ClassTerm> per_class;
  double tau = 1.0;
  EstimateMethod method = EstimateMethod::hdr;
  /// For two classes with equal priors: the exact value, for comparison.
  std::optional<double> closed_form;

  std::size_t levels_total() const;
};

/// Bayes error 1 - sum_k pi_k P_k, each class term integrated over its
/// whitened decision polytope by multilevel splitting. Classes run in
/// parallel within config.threads; results do not depend on it.
BayesErrorEstimate compute_bayes_error(const GaussianClassModel& model, double tau, const HdrConfig& config);

/// Misclassification rate of the Bayes classifier on n labelled draws.
BayesErrorEstimate monte_carlo_bayes_error(const GaussianClassModel& model, double tau, std::uint64_t n,
                                           std::uint64_t seed, std::size_t threads = 1);

/// Exact value for two equal-prior classes, wrapped as an estimate.
BayesErrorEstimate closed_form_bayes_error(const GaussianClassModel& model, double tau);

struct TemperatureCurve {
  std::vector<double> taus;
  std::vector<BayesErrorEstimate> estimates;
  /// Adjacent pairs that decrease by more than 3 combined standard errors
  /// (only checked for uniform priors, where the truth is monotone).
  std::vector<std::string> warnings;
};

std::vector<double> geometric_grid(double lo, double hi, std::size_t steps);
std::vector<double> linear_grid(double lo, double hi, std::size_t steps);

TemperatureCurve temperature_sweep(const GaussianClassModel& model, std::span<const double> taus,
                                   const HdrConfig& config);

struct InversionOptions {
  /// Absolute error tolerance on the Bayes error; evaluation within
  /// max(tol_error, 2 stderr) of the target stops the search.
  double tol_error = 0.0;
  std::size_t max_evaluations = 64;
};

struct InversionResult {
  double tau = 0.0;
  BayesErrorEstimate estimate;
  std::size_t evaluations = 0;
  std::size_t repeats_used = 0;
  std::vector<std::string> warnings;
};

/// Bisection for tau with Bayes error equal to `target`, stopping when the
/// bracket is narrower than tol * tau or the estimate is within
/// max(tol_error, 2 stderr) of the target. Throws Error(out_of_range) if the
/// target is not bracketed by [tau_lo, tau_hi] (with 3-stderr slack) and
/// Error(numerical) when the evaluation budget runs out.
InversionResult invert_temperature(const GaussianClassModel& model, double target, double tau_lo, double tau_hi,
                                   double tol, const HdrConfig& config, const InversionOptions& options = {});

enum class OneVsAllWeights {
  balanced,  // P(label 0) = P(label 1) = 1/2
  natural,   // P(label 0) = pi_j
};

struct McError {
  double error = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo Bayes error of class j against the prior-weighted mixture of
/// all other classes.
McError one_vs_all_error(const GaussianClassModel& model, ClassIndex j, double tau, std::uint64_t n,
                         std::uint64_t seed, OneVsAllWeights weights = OneVsAllWeights::balanced,
                         std::size_t threads = 1);

}  // namespace bayes_bound

#endif
