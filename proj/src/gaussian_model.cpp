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

#include "bayes_bound/gaussian_model.hpp"

#include "bayes_bound/error.hpp"
#include "bayes_bound/normal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <sstream>

namespace bayes_bound {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPriorTolerance = 1e-9;
constexpr double kJitterScales[] = {1e-10, 1e-8, 1e-6};

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

GaussianClassModel GaussianClassModel::create(Eigen::MatrixXd means, Eigen::MatrixXd covariance,
                                              Eigen::VectorXd priors, CovarianceKind kind) {
  const Eigen::Index k = means.rows();
  const Eigen::Index d = means.cols();
  require(k >= 1, "model needs at least one class");
  require(d >= 1, "model dimension must be positive");
  require(priors.size() == k, "priors length does not match the number of classes");
  require(covariance.rows() == d && covariance.cols() == d, "covariance shape does not match the dimension");
  require(all_finite(means), "means contain non-finite values");
  require(all_finite(covariance), "covariance contains non-finite values");
  require(priors.allFinite(), "priors contain non-finite values");
  require((priors.array() >= 0.0).all(), "priors must be nonnegative");
  const double total = priors.sum();
  if (std::abs(total - 1.0) > kPriorTolerance) fail(ErrorKind::invalid_argument, "priors do not sum to 1");

  const double scale = covariance.cwiseAbs().maxCoeff();
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) fail(ErrorKind::invalid_argument, "covariance is not symmetric");

  GaussianClassModel model;
  model.kind_ = kind;

  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    const double mean_diag = covariance.diagonal().mean();
    bool ok = false;
    for (double s : kJitterScales) {
      const double eps = s * mean_diag;
      if (!(eps > 0.0)) break;
      Eigen::MatrixXd jittered = covariance;
      jittered.diagonal().array() += eps;
      llt.compute(jittered);
      if (llt.info() == Eigen::Success) {
        model.jitter_ = eps;
        ok = true;
        break;
      }
    }
    if (!ok) fail(ErrorKind::numerical, "covariance is not positive definite (after jitter)");
  }
  model.chol_ = llt.matrixL();
  model.half_log_det_ = model.chol_.diagonal().array().log().sum();
  model.means_ = std::move(means);
  model.covariance_ = std::move(covariance);
  // Tiny rounding drift is kept as-is so exported priors round-trip bit-exactly.
  model.priors_ = std::abs(total - 1.0) > 1e-15 ? Eigen::VectorXd(priors / total) : priors;
  model.whitened_means_ =
      model.chol_.triangularView<Eigen::Lower>().solve(model.means_.transpose()).transpose();
  return model;
}

Eigen::VectorXd GaussianClassModel::whiten(const Eigen::VectorXd& v) const {
  return chol_.triangularView<Eigen::Lower>().solve(v);
}

void GaussianClassModel::check(ClassIndex j) const {
  if (j.value < 0 || j.value >= num_classes()) {
    std::ostringstream msg;
    msg << "class index " << j.value << " out of range [0, " << num_classes() << ")";
    fail(ErrorKind::invalid_argument, msg.str());
  }
}

double log_density(const GaussianClassModel& model, ClassIndex j, const Eigen::VectorXd& x, double tau) {
  require(tau > 0.0, "temperature must be positive");
  model.check(j);
  const Eigen::VectorXd v = model.whiten((x - model.mean(j)) / tau);
  const double d = model.dim();
  return -0.5 * d * kLogTwoPi - d * std::log(tau) - model.half_log_det() - 0.5 * v.squaredNorm();
}

Eigen::VectorXd sample(const GaussianClassModel& model, ClassIndex j, double tau, Rng& rng) {
  require(tau > 0.0, "temperature must be positive");
  model.check(j);
  const Eigen::VectorXd u = rng.normal_vector(model.dim());
  const Eigen::VectorXd lu = model.chol().triangularView<Eigen::Lower>() * u;
  return model.mean(j) + tau * lu;
}

ClassIndex bayes_classify(const GaussianClassModel& model, const Eigen::VectorXd& x, double tau) {
  require(tau > 0.0, "temperature must be positive");
  // The normalizing constant is shared by all classes; compare
  // log pi_j - |L^{-1}(x - mu_j)|^2 / (2 tau^2) via the cached whitened means.
  const Eigen::VectorXd wx = model.whiten(x);
  const double inv2 = 0.5 / (tau * tau);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < model.num_classes(); ++j) {
    const double pj = model.priors()(j);
    if (pj <= 0.0) continue;
    const double score = std::log(pj) - inv2 * (wx - model.whitened_means().row(j).transpose()).squaredNorm();
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return ClassIndex{best};
}

double whitened_distance(const GaussianClassModel& model, ClassIndex a, ClassIndex b) {
  model.check(a);
  model.check(b);
  return model.whiten(model.mean(a) - model.mean(b)).norm();
}

namespace {
void require_binary_uniform(const GaussianClassModel& model, double tau) {
  require(tau > 0.0, "temperature must be positive");
  require(model.num_classes() == 2, "closed form requires exactly two classes");
  require(std::abs(model.priors()(0) - 0.5) <= 1e-12 && std::abs(model.priors()(1) - 0.5) <= 1e-12,
          "closed form requires equal priors");
}
}  // namespace

double binary_closed_form(const GaussianClassModel& model, double tau) {
  require_binary_uniform(model, tau);
  return normal_sf(whitened_distance(model, ClassIndex{0}, ClassIndex{1}) / (2.0 * tau));
}

double binary_closed_form_log(const GaussianClassModel& model, double tau) {
  require_binary_uniform(model, tau);
  return log_normal_sf(whitened_distance(model, ClassIndex{0}, ClassIndex{1}) / (2.0 * tau));
}

GaussianClassModel generate_synthetic(int num_classes, int dim, MeanScheme scheme, std::uint64_t seed) {
  require(num_classes >= 1, "number of classes must be positive");
  require(dim >= 1, "dimension must be positive");
  Rng rng(derive_seed(seed, {0x5e7}));
  Eigen::MatrixXd means(num_classes, dim);
  if (scheme == MeanScheme::unit_sphere) {
    for (int j = 0; j < num_classes; ++j) {
      Eigen::VectorXd v = rng.normal_vector(dim);
      means.row(j) = (v / v.norm()).transpose();
    }
  } else {
    require(dim >= num_classes - 1, "simplex scheme needs dim >= classes - 1");
    // Centered standard basis e_j - 1/K lives in a (K-1)-dim subspace of R^K;
    // its orthonormal coordinates give a regular simplex, scaled to unit norm.
    const int k = num_classes;
    Eigen::MatrixXd centered = Eigen::MatrixXd::Identity(k, k);
    centered.array() -= 1.0 / k;
    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(k, dim);
    if (k > 1) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered.transpose());
      const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k - 1);
      const Eigen::MatrixXd low = centered * q;  // k x (k-1)
      Eigen::MatrixXd g(dim, dim);
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> rot(g);
      const Eigen::MatrixXd basis = rot.householderQ() * Eigen::MatrixXd::Identity(dim, k - 1);
      coords = low * basis.transpose();
      coords /= coords.row(0).norm();
    }
    means = coords;
  }
  return GaussianClassModel::create(std::move(means), Eigen::MatrixXd::Identity(dim, dim),
                                    Eigen::VectorXd::Constant(num_classes, 1.0 / num_classes),
                                    CovarianceKind::scalar);
}

}  // namespace bayes_bound
