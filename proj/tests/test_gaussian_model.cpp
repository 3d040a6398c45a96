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


#include "bayes_bound/error.hpp"
#include "bayes_bound/gaussian_model.hpp"
#include "bayes_bound/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace bayes_bound;

namespace {

Eigen::MatrixXd random_spd(int d, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  rng.fill_normal(a);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

GaussianClassModel random_model(int k, int d, std::uint64_t seed, bool uniform = false) {
  Rng rng(seed);
  Eigen::MatrixXd means(k, d);
  rng.fill_normal(means);
  Eigen::VectorXd priors(k);
  for (int j = 0; j < k; ++j) priors(j) = uniform ? 1.0 : 0.5 + rng.uniform();
  priors /= priors.sum();
  return GaussianClassModel::create(means, random_spd(d, rng), priors);
}

GaussianClassModel one_dim_pair() {
  Eigen::MatrixXd means(2, 1);
  means << -1.0, 1.0;
  return GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector2d(0.5, 0.5));
}

}  // namespace

TEST_CASE("create: K=2, d=1 identity factor") {
  const auto m = one_dim_pair();
  CHECK(m.num_classes() == 2);
  CHECK(m.dim() == 1);
  CHECK(m.chol()(0, 0) == 1.0);
  CHECK(m.jitter() == 0.0);
}

TEST_CASE("create: priors must sum to one") {
  Eigen::MatrixXd means(2, 1);
  means << -1.0, 1.0;
  try {
    GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector2d(0.7, 0.4));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("priors do not sum to 1") != std::string::npos);
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
  CHECK_THROWS_AS(GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector2d(1.2, -0.2)),
                  Error);
}

TEST_CASE("create: rejects malformed shapes and asymmetric covariance") {
  Eigen::MatrixXd means(2, 2);
  means.setZero();
  CHECK_THROWS_AS(GaussianClassModel::create(means, Eigen::MatrixXd::Identity(3, 3), Eigen::Vector2d(0.5, 0.5)),
                  Error);
  CHECK_THROWS_AS(GaussianClassModel::create(means, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(0.3, 0.3, 0.4)),
                  Error);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(GaussianClassModel::create(means, asym, Eigen::Vector2d(0.5, 0.5)), Error);
  CHECK_THROWS_AS(GaussianClassModel::create(Eigen::MatrixXd(0, 2), Eigen::MatrixXd::Identity(2, 2),
                                             Eigen::VectorXd(0)),
                  Error);
}

TEST_CASE("create: Cholesky reconstructs a random SPD covariance") {
  const auto m = random_model(3, 4, 11);
  const Eigen::MatrixXd recon = m.chol() * m.chol().transpose();
  CHECK((recon - m.covariance()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(m.chol().isLowerTriangular());
}

TEST_CASE("create: jitter rescues a borderline covariance but not an indefinite one") {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(2, 3);
  means(1, 0) = 1.0;
  // Slightly indefinite, as exported covariances sometimes are.
  Eigen::Matrix3d psd = Eigen::Vector3d(1.0, 2.0, -1e-12).asDiagonal();
  const auto m = GaussianClassModel::create(means, psd, Eigen::Vector2d(0.5, 0.5));
  CHECK(m.jitter() > 0.0);
  CHECK(m.jitter() <= 1e-6 * psd.diagonal().mean() * (1 + 1e-12));

  Eigen::Matrix3d indefinite = Eigen::Matrix3d::Identity();
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(GaussianClassModel::create(means, indefinite, Eigen::Vector2d(0.5, 0.5)), Error);
}

TEST_CASE("log_density examples") {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(1, 1);
  const auto m1 = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1));
  CHECK(log_density(m1, ClassIndex{0}, Eigen::VectorXd::Zero(1), 1.0) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  Eigen::MatrixXd means2(1, 2);
  means2 << 0.3, -1.2;
  const auto m2 = GaussianClassModel::create(means2, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(1));
  CHECK(log_density(m2, ClassIndex{0}, means2.row(0).transpose(), 1.0) ==
        doctest::Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("log_density matches the dense formula") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(2, 3, 100 + trial);
    const Eigen::VectorXd x = rng.normal_vector(3) * 2.0;
    for (double tau : {0.3, 1.0, 2.5}) {
      for (int j = 0; j < 2; ++j) {
        const double want = oracle::dense_log_density(x, m.mean(ClassIndex{j}), m.covariance(), tau);
        CHECK(std::abs(log_density(m, ClassIndex{j}, x, tau) - want) <= 1e-10);
      }
    }
  }
}

TEST_CASE("log_density integrates to one for d <= 2") {
  // d = 1
  {
    Eigen::MatrixXd means(1, 1);
    means << 0.4;
    Eigen::MatrixXd cov(1, 1);
    cov << 2.3;
    const auto m = GaussianClassModel::create(means, cov, Eigen::VectorXd::Ones(1));
    for (double tau : {0.5, 1.7}) {
      const double half = 8.0 * tau * std::sqrt(2.3);
      const int n = 4000;
      const double h = 2.0 * half / n;
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        Eigen::VectorXd x(1);
        x << 0.4 - half + i * h;
        sum += w * std::exp(log_density(m, ClassIndex{0}, x, tau));
      }
      CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
  // d = 2 with correlation
  {
    Eigen::MatrixXd means(1, 2);
    means << 1.0, -0.5;
    Eigen::Matrix2d cov;
    cov << 1.5, 0.6, 0.6, 0.8;
    const auto m = GaussianClassModel::create(means, cov, Eigen::VectorXd::Ones(1));
    const double tau = 0.8;
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues().maxCoeff();
    const double half = 8.0 * tau * std::sqrt(lmax);
    const int n = 600;
    const double h = 2.0 * half / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      for (int k = 0; k <= n; ++k) {
        const double w = ((i == 0 || i == n) ? 0.5 : 1.0) * ((k == 0 || k == n) ? 0.5 : 1.0);
        Eigen::VectorXd x(2);
        x << 1.0 - half + i * h, -0.5 - half + k * h;
        sum += w * std::exp(log_density(m, ClassIndex{0}, x, tau));
      }
    }
    CHECK(sum * h * h == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("sample: concentration, variance and determinism") {
  const auto m = random_model(2, 4, 21);
  Rng rng(3);
  const Eigen::VectorXd x = sample(m, ClassIndex{1}, 1e-12, rng);
  CHECK((x - m.mean(ClassIndex{1})).cwiseAbs().maxCoeff() <= 1e-9);

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(1, 1);
  const auto m1 = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1));
  Rng r2(99);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sample(m1, ClassIndex{0}, 2.0, r2)(0);
    s += v;
    s2 += v * v;
  }
  const double var = (s2 - s * s / n) / (n - 1);
  CHECK(var >= 3.96);
  CHECK(var <= 4.04);

  Rng a(42), b(42);
  CHECK(sample(m, ClassIndex{0}, 0.7, a) == sample(m, ClassIndex{0}, 0.7, b));
}

TEST_CASE("bayes_classify examples") {
  const auto m = one_dim_pair();
  CHECK(bayes_classify(m, Eigen::VectorXd::Constant(1, 0.5), 1.0) == ClassIndex{1});
  CHECK(bayes_classify(m, Eigen::VectorXd::Constant(1, -0.5), 1.0) == ClassIndex{0});
  CHECK(bayes_classify(m, Eigen::VectorXd::Constant(1, 0.0), 1.0) == ClassIndex{0});

  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(3, 2);
  const auto tied = GaussianClassModel::create(same, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d::Constant(1.0 / 3));
  Rng rng(1);
  for (int i = 0; i < 20; ++i) CHECK(bayes_classify(tied, rng.normal_vector(2) * 5.0, 1.3) == ClassIndex{0});
}

TEST_CASE("bayes_classify matches dense log posteriors") {
  const auto m = random_model(4, 8, 77);
  Rng rng(8);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = rng.normal_vector(8) * 2.0;
    const double tau = 0.5 + rng.uniform();
    int best = 0;
    double best_score = -1e300;
    for (int j = 0; j < 4; ++j) {
      const double s = std::log(m.priors()(j)) + oracle::dense_log_density(x, m.mean(ClassIndex{j}), m.covariance(), tau);
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    if (bayes_classify(m, x, tau).value != best) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("bayes_classify is invariant to a common prior scale") {
  Rng rng(13);
  Eigen::MatrixXd means(3, 2);
  rng.fill_normal(means);
  const Eigen::Vector3d raw(0.2, 0.3, 0.5);
  const auto a = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(2, 2), raw);
  const Eigen::Vector3d scaled = (raw * 7.3) / (raw * 7.3).sum();
  const auto b = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(2, 2), scaled);
  for (int i = 0; i < 500; ++i) {
    const Eigen::VectorXd x = rng.normal_vector(2) * 3.0;
    CHECK(bayes_classify(a, x, 1.1) == bayes_classify(b, x, 1.1));
  }
}

TEST_CASE("bayes_classify never picks a zero-prior class") {
  Eigen::MatrixXd means(2, 1);
  means << 0.0, 1.0;
  const auto m = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector2d(1.0, 0.0));
  CHECK(bayes_classify(m, Eigen::VectorXd::Constant(1, 1.0), 1.0) == ClassIndex{0});
}

TEST_CASE("binary_closed_form examples") {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(3);
  mu(1) = 0.4;
  CHECK(binary_closed_form(oracle::binary_model(mu, mu), 1.0) == 0.5);

  const auto orth = oracle::binary_model(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0));
  const double want = 1.0 - oracle::phi(std::sqrt(2.0) / 2.0);
  CHECK(std::abs(binary_closed_form(orth, 1.0) - want) <= 1e-14);
  CHECK(std::abs(binary_closed_form(orth, 1.0) - 0.2397501) <= 5e-8);

  double prev = -1.0;
  for (double tau : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double e = binary_closed_form(orth, tau);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("binary_closed_form uses the whitened distance") {
  Rng rng(17);
  Eigen::MatrixXd a(3, 3);
  rng.fill_normal(a);
  const Eigen::MatrixXd cov = a * a.transpose() + Eigen::MatrixXd::Identity(3, 3);
  const Eigen::Vector3d mu0(0.5, -0.2, 1.0), mu1(-0.3, 0.8, 0.1);
  const auto m = oracle::binary_model(mu0, mu1, cov);
  const double delta = std::sqrt((mu0 - mu1).dot(cov.inverse() * (mu0 - mu1)));
  for (double tau : {0.1, 0.6, 3.0}) {
    CHECK(std::abs(binary_closed_form(m, tau) - oracle::binary_error(delta, tau)) <= 1e-14);
    CHECK(binary_closed_form_log(m, tau) == doctest::Approx(std::log(oracle::binary_error(delta, tau))).epsilon(1e-12));
  }
  CHECK(binary_closed_form_log(m, 1e-3) == doctest::Approx(oracle::log_phi(-delta / 2e-3)).epsilon(1e-12));
}

TEST_CASE("binary_closed_form: increasing in tau and vanishing as tau -> 0") {
  const auto m = oracle::symmetric_binary(4, 1.3);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double e = binary_closed_form(m, 0.05 * i);
    CHECK(e > prev);
    prev = e;
  }
  CHECK(binary_closed_form(m, 1e-3) < 1e-100);
}

TEST_CASE("binary_closed_form preconditions") {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(3, 1);
  means(1, 0) = 1.0;
  const auto three = GaussianClassModel::create(means, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector3d::Constant(1.0 / 3));
  CHECK_THROWS_AS(binary_closed_form(three, 1.0), Error);
  Eigen::MatrixXd two(2, 1);
  two << 0.0, 1.0;
  const auto skewed = GaussianClassModel::create(two, Eigen::MatrixXd::Identity(1, 1), Eigen::Vector2d(0.3, 0.7));
  CHECK_THROWS_AS(binary_closed_form(skewed, 1.0), Error);
}

TEST_CASE("sampling then classifying reproduces the closed form") {
  for (double delta : {0.5, 1.5, 3.0}) {
    const auto m = oracle::symmetric_binary(3, delta);
    Rng rng(1000 + static_cast<std::uint64_t>(delta * 10));
    const int n = 100000;
    int wrong = 0;
    for (int i = 0; i < n; ++i) {
      const int y = i % 2;
      if (bayes_classify(m, sample(m, ClassIndex{y}, 1.0, rng), 1.0).value != y) ++wrong;
    }
    const double p = binary_closed_form(m, 1.0);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(oracle::within_sigmas(static_cast<double>(wrong) / n, p, se));
  }
}

TEST_CASE("generate_synthetic") {
  const auto sphere = generate_synthetic(5, 20, MeanScheme::unit_sphere, 4);
  CHECK(sphere.num_classes() == 5);
  for (int j = 0; j < 5; ++j) CHECK(sphere.mean(ClassIndex{j}).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sphere.covariance().isIdentity());
  CHECK(sphere.priors().isApproxToConstant(0.2));
  CHECK(generate_synthetic(5, 20, MeanScheme::unit_sphere, 4).means() == sphere.means());
  CHECK(generate_synthetic(5, 20, MeanScheme::unit_sphere, 5).means() != sphere.means());

  const auto simplex = generate_synthetic(4, 6, MeanScheme::simplex, 9);
  const double d01 = whitened_distance(simplex, ClassIndex{0}, ClassIndex{1});
  for (int a = 0; a < 4; ++a) {
    CHECK(simplex.mean(ClassIndex{a}).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int b = a + 1; b < 4; ++b)
      CHECK(whitened_distance(simplex, ClassIndex{a}, ClassIndex{b}) == doctest::Approx(d01).epsilon(1e-12));
  }
  CHECK(d01 == doctest::Approx(std::sqrt(2.0 * 4.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(generate_synthetic(5, 3, MeanScheme::simplex, 1), Error);
}
