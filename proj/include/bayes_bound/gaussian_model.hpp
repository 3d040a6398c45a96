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

#ifndef BAYES_BOUND_GAUSSIAN_MODEL_HPP
#define BAYES_BOUND_GAUSSIAN_MODEL_HPP

#include "bayes_bound/rng.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace bayes_bound {

/// How the covariance payload was stored. The model always holds the full
/// d x d matrix; the kind is kept so files round-trip in their own encoding.
enum class CovarianceKind : std::uint8_t { full = 0, diagonal = 1, scalar = 2 };

/// Index of a class in a GaussianClassModel.
struct ClassIndex {
  int value = 0;
  friend bool operator==(ClassIndex, ClassIndex) = default;
};

/// K Gaussian class-conditionals N(mu_j, Sigma) sharing one covariance, with
/// class priors. Immutable after construction; the Cholesky factor of Sigma
/// is computed once here.
class GaussianClassModel {
 public:
  /// Validates and factors. `means` is K x d (row j = mu_j). Priors must be
  /// nonnegative and sum to 1 within 1e-9; any drift beyond rounding
  /// is renormalized away.
  /// Throws Error on any violated invariant or a covariance that stays
  /// non-positive-definite after jitter.
  static GaussianClassModel create(Eigen::MatrixXd means, Eigen::MatrixXd covariance, Eigen::VectorXd priors,
                                   CovarianceKind kind = CovarianceKind::full);

  int num_classes() const { return static_cast<int>(means_.rows()); }
  int dim() const { return static_cast<int>(means_.cols()); }

  const Eigen::MatrixXd& means() const { return means_; }
  Eigen::VectorXd mean(ClassIndex j) const { return means_.row(j.value).transpose(); }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  /// Lower-triangular L with Sigma (+ jitter) = L L^T.
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& priors() const { return priors_; }
  CovarianceKind covariance_kind() const { return kind_; }
  /// Diagonal jitter added to make the factorization succeed (0 if none).
  double jitter() const { return jitter_; }
  /// sum_i log L_ii.
  double half_log_det() const { return half_log_det_; }
  /// Rows are L^{-1} mu_j.
  const Eigen::MatrixXd& whitened_means() const { return whitened_means_; }

  /// Solves L w = v.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;

  /// Throws unless 0 <= j < K.
  void check(ClassIndex j) const;

 private:
  GaussianClassModel() = default;

  Eigen::MatrixXd means_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd priors_;
  Eigen::MatrixXd whitened_means_;
  CovarianceKind kind_ = CovarianceKind::full;
  double jitter_ = 0.0;
  double half_log_det_ = 0.0;
};

/// log N(x; mu_j, tau^2 Sigma).
double log_density(const GaussianClassModel& model, ClassIndex j, const Eigen::VectorXd& x, double tau);

/// mu_j + tau L u with u ~ N(0, I) from `rng`.
Eigen::VectorXd sample(const GaussianClassModel& model, ClassIndex j, double tau, Rng& rng);

/// argmax_j [log pi_j + log_density(j)], ties to the lowest index.
ClassIndex bayes_classify(const GaussianClassModel& model, const Eigen::VectorXd& x, double tau);

/// ||L^{-1}(mu_a - mu_b)||_2.
double whitened_distance(const GaussianClassModel& model, ClassIndex a, ClassIndex b);

/// 1 - Phi(Delta / (2 tau)) for a two-class model with equal priors.
double binary_closed_form(const GaussianClassModel& model, double tau);

/// Natural log of binary_closed_form, accurate far into the tail.
double binary_closed_form_log(const GaussianClassModel& model, double tau);

enum class MeanScheme { unit_sphere, simplex };

/// Synthetic model with identity covariance and uniform priors.
/// unit_sphere: K independent uniformly random unit vectors (seeded).
/// simplex: vertices of a regular simplex with unit-norm vertices, all pairwise
/// distances equal, randomly rotated into R^d (requires d >= K - 1).
GaussianClassModel generate_synthetic(int num_classes, int dim, MeanScheme scheme, std::uint64_t seed);

}  // namespace bayes_bound

#endif
