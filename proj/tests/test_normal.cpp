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


#include "bayes_bound/normal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace bayes_bound;

TEST_CASE("normal_cdf matches a 50-digit erfc") {
  for (double x = -38.0; x <= 8.0; x += 0.37) {
    const double want = oracle::phi(x);
    CHECK(std::abs(normal_cdf(x) - want) <= 1e-14);
    // Relative accuracy is limited by the conditioning of the tail, ~x^2 ulp.
    if (want > 0.0) CHECK(std::abs(normal_cdf(x) / want - 1.0) <= 1e-15 * (4.0 + x * x));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_sf(1.0) == doctest::Approx(oracle::phi(-1.0)).epsilon(1e-15));
}

TEST_CASE("log_normal_cdf is accurate across the tail") {
  for (double x : {-1e4, -500.0, -80.0, -40.0, -37.5, -37.0, -36.9, -20.0, -3.0, 0.0, 2.0, 9.0}) {
    CAPTURE(x);
    const double want = oracle::log_phi(x);
    CHECK(std::abs(log_normal_cdf(x) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
  // Upper tail where Phi(x) rounds to 1 in double.
  CHECK(log_normal_cdf(10.0) < 0.0);
  CHECK(log_normal_sf(10.0) == doctest::Approx(oracle::log_phi(-10.0)).epsilon(1e-13));
}

TEST_CASE("log_normal_cdf is continuous at its branch points") {
  for (double x0 : {-37.0, 0.0}) {
    const double below = log_normal_cdf(std::nextafter(x0, -1e300));
    const double at = log_normal_cdf(x0);
    CHECK(std::abs(below - at) <= 1e-12 * std::max(1.0, std::abs(at)));
  }
}

TEST_CASE("log_sum_exp") {
  const std::vector<double> a{std::log(0.25), std::log(0.5), std::log(0.25)};
  CHECK(log_sum_exp(a) == doctest::Approx(0.0).epsilon(1e-15));
  const std::vector<double> tiny{-1000.0, -1000.0};
  CHECK(log_sum_exp(tiny) == doctest::Approx(-1000.0 + std::log(2.0)));
  const std::vector<double> none;
  CHECK(log_sum_exp(none) == -std::numeric_limits<double>::infinity());
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> all_neg_inf{ninf, ninf};
  CHECK(log_sum_exp(all_neg_inf) == ninf);
}
