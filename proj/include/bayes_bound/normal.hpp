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

#ifndef BAYES_BOUND_NORMAL_HPP
#define BAYES_BOUND_NORMAL_HPP

#include <span>

namespace bayes_bound {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// Standard normal CDF, evaluated through erfc so both tails keep full
/// relative precision.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x).
double normal_sf(double x);

/// log Phi(x); finite for every finite x, including far below the point
/// where Phi(x) underflows.
double log_normal_cdf(double x);

/// log(1 - Phi(x)).
inline double log_normal_sf(double x) { return log_normal_cdf(-x); }

/// log(sum(exp(values))); -inf for an empty range or all -inf.
double log_sum_exp(std::span<const double> values);

}  // namespace bayes_bound

#endif
