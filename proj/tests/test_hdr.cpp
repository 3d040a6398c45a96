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
#include "bayes_bound/hdr.hpp"
#include "bayes_bound/normal.hpp"
#include "bayes_bound/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

using namespace bayes_bound;

namespace {

HalfSpaceSet axis_set(int r, int m, double threshold) {
  // u_i > threshold for i < m.
  HalfSpaceSet set;
  set.dim = r;
  for (int i = 0; i < m; ++i) {
    HalfSpace h;
    h.normal = Eigen::VectorXd::Zero(r);
    h.normal(i) = 1.0;
    h.offset = -threshold;
    set.constraints.push_back(h);
  }
  return set;
}

}  // namespace

TEST_CASE("forced-empty and unconstrained sets are exact") {
  HalfSpaceSet empty;
  empty.dim = 3;
  empty.forced_empty = true;
  const auto e = estimate_polytope_probability(empty, HdrConfig{});
  CHECK(e.p == 0.0);
  CHECK(e.log_p == -INFINITY);
  HalfSpaceSet all;
  all.dim = 3;
  const auto a = estimate_polytope_probability(all, HdrConfig{});
  CHECK(a.p == 1.0);
  CHECK(a.log_p == 0.0);
  CHECK(a.std_error == 0.0);
}

TEST_CASE("config validation") {
  HdrConfig cfg;
  cfg.rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.n_per_level = 8;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.repeats = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("half-space through the origin has probability one half") {
  HalfSpaceSet set;
  set.dim = 4;
  set.constraints.push_back({Eigen::Vector4d(0.3, -1.0, 2.0, 0.5), 0.0});
  const auto est = estimate_polytope_probability(set, HdrConfig{});
  CHECK(oracle::within_sigmas(est.p, 0.5, est.std_error));
  CHECK(est.std_error > 0.0);
}

TEST_CASE("orthant in r=10") {
  const auto est = estimate_polytope_probability(axis_set(10, 5, 0.0), HdrConfig{});
  CHECK(oracle::within_sigmas(est.p, 0.03125, est.std_error));
  for (std::size_t l : est.levels) CHECK(l >= 4);
}

TEST_CASE("half-space probabilities at r in {1, 8, 64}") {
  Rng rng(606);
  double worst = 0.0;
  for (int r : {1, 8, 64}) {
    for (int i = 0; i < 20; ++i) {
      HalfSpaceSet set;
      set.dim = r;
      const Eigen::VectorXd a = rng.normal_vector(r) * (0.5 + 2.0 * rng.uniform());
      const double t = -3.0 + 4.5 * rng.uniform();
      set.constraints.push_back({a, t * a.norm()});
      HdrConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(100 * r + i);
      // Only the projection onto a matters, and it mixes in a step or two;
      // thinning by r would just cost r^2.
      cfg.thin = std::min(r, 8);
      cfg.burn_in = 4 * cfg.thin;
      const auto est = estimate_polytope_probability(set, cfg);
      CAPTURE(r);
      CAPTURE(t);
      CHECK(oracle::within_sigmas(est.p, oracle::phi(t), est.std_error));
      worst = std::max(worst, std::abs(est.p - oracle::phi(t)) / est.std_error);
    }
  }
  MESSAGE("largest deviation in standard errors: " << worst);
}

TEST_CASE("p and log_p are consistent") {
  const auto est = estimate_polytope_probability(axis_set(6, 3, 0.5), HdrConfig{});
  CHECK(est.p == doctest::Approx(std::exp(est.log_p)).epsilon(1e-12));
  CHECK(est.levels.size() == 8);
  CHECK(est.std_error >= 0.0);
  CHECK(est.std_error_log >= 0.0);
}

TEST_CASE("mc_polytope_probability") {
  HalfSpaceSet none;
  none.dim = 2;
  CHECK(mc_polytope_probability(none, 10, 1).p == 1.0);

  HalfSpaceSet half;
  half.dim = 3;
  half.constraints.push_back({Eigen::Vector3d(0.0, 2.0, 0.0), 2.0});
  const auto mc = mc_polytope_probability(half, 200000, 5);
  CHECK(oracle::within_sigmas(mc.p, oracle::phi(1.0), mc.std_error));
}

TEST_CASE("HDR agrees with Monte Carlo on a random polytope in r=3") {
  Rng rng(31);
  HalfSpaceSet set;
  set.dim = 3;
  for (int i = 0; i < 5; ++i) set.constraints.push_back({rng.normal_vector(3), 0.3 + rng.uniform()});
  const auto mc = mc_polytope_probability(set, 1000000, 77);
  const auto est = estimate_polytope_probability(set, HdrConfig{});
  CHECK(oracle::within_sigmas(est.p, mc.p, std::hypot(est.std_error, mc.std_error)));
}

TEST_CASE("scaling a constraint leaves the estimate unchanged") {
  Rng rng(12);
  HalfSpaceSet set;
  set.dim = 4;
  for (int i = 0; i < 3; ++i) set.constraints.push_back({rng.normal_vector(4), -0.5 + rng.uniform()});
  HdrConfig cfg;
  cfg.n_per_level = 128;
  const auto base = estimate_polytope_probability(set, cfg);
  HalfSpaceSet doubled = set;
  doubled.constraints[1].normal *= 2.0;
  doubled.constraints[1].offset *= 2.0;
  const auto same = estimate_polytope_probability(doubled, cfg);
  CHECK(same.log_p == base.log_p);
  CHECK(same.std_error == base.std_error);
  HalfSpaceSet odd = set;
  odd.constraints[0].normal *= 3.7;
  odd.constraints[0].offset *= 3.7;
  const auto scaled = estimate_polytope_probability(odd, cfg);
  CHECK(std::abs(scaled.log_p - base.log_p) <= 1e-9);
}

TEST_CASE("raising offsets never lowers Monte Carlo membership") {
  Rng rng(44);
  HalfSpaceSet set;
  set.dim = 5;
  for (int i = 0; i < 4; ++i) set.constraints.push_back({rng.normal_vector(5), -1.0 + rng.uniform()});
  double prev = -1.0;
  for (int step = 0; step < 8; ++step) {
    HalfSpaceSet shifted = set;
    for (auto& h : shifted.constraints) h.offset += 0.4 * step;
    const double p = mc_polytope_probability(shifted, 50000, 9).p;  // same draws at every step
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("1e-200 corner is reached in log space") {
  // u_i > t for 40 independent axes with 40 log Phi(-t) = log 1e-200.
  const int m = 40;
  const double target = std::log(1e-200) / m;
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_normal_cdf(-mid) > target ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const double exact = m * oracle::log_phi(-t);
  CHECK(exact == doctest::Approx(std::log(1e-200)).epsilon(1e-9));
  HdrConfig cfg;
  cfg.n_per_level = 256;
  cfg.repeats = 1;
  cfg.thin = 4;
  cfg.burn_in = 8;
  cfg.max_levels = 2000;
  const auto est = estimate_polytope_probability(axis_set(m, m, t), cfg);
  CAPTURE(est.log_p);
  CHECK(std::isfinite(est.log_p));
  CHECK(std::abs(est.log_p - exact) <= 0.05 * std::abs(exact));
}

TEST_CASE("nesting failure is reported") {
  HdrConfig cfg;
  cfg.max_levels = 3;
  try {
    estimate_polytope_probability(axis_set(4, 4, 1.0), cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
    CHECK(std::string(e.what()).find("nesting failed to reach zero") != std::string::npos);
  }
}

TEST_CASE("results do not depend on the thread count") {
  HdrConfig cfg;
  cfg.repeats = 6;
  cfg.n_per_level = 128;
  const auto set = axis_set(5, 3, 0.3);
  cfg.threads = 1;
  const auto a = estimate_polytope_probability(set, cfg, 7);
  cfg.threads = 4;
  const auto b = estimate_polytope_probability(set, cfg, 7);
  CHECK(a.log_p == b.log_p);
  CHECK(a.std_error == b.std_error);
  CHECK(a.levels == b.levels);
  const auto other = estimate_polytope_probability(set, cfg, 8);
  CHECK(other.log_p != a.log_p);
}
