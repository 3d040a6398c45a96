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

#ifndef BAYES_BOUND_REPORTS_HPP
#define BAYES_BOUND_REPORTS_HPP

#include "bayes_bound/bayes_error.hpp"
#include "bayes_bound/hdr.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bayes_bound {

/// Formats a double with 17 significant digits (round-trippable).
std::string format_double(double value);

/// Header `tau,bayes_error,stderr,method,levels_total`, one row per point.
void write_sweep_csv(std::ostream& out, const TemperatureCurve& curve);

/// Binary-problem accuracy check: two random unit-vector means in R^dim,
/// identity base covariance, equal priors; at each temperature the HDR
/// estimate is compared against the closed form.
struct ClosedFormCheckRow {
  double tau = 0.0;
  double exact = 0.0;
  double hdr = 0.0;
  double std_error = 0.0;
  double rel_err = 0.0;
  /// The exact error is below kLogSpaceCutoff; rel_err compares logarithms.
  bool log_space = false;
};

struct ClosedFormCheck {
  std::vector<ClosedFormCheckRow> rows;
  double tolerance = 0.05;
  bool pass = false;
};

inline constexpr double kLogSpaceCutoff = 1e-40;

ClosedFormCheck validate_binary_closed_form(int dim, std::span<const double> taus, const HdrConfig& config,
                                            std::uint64_t model_seed, double tolerance = 0.05);

/// Header `tau,exact,hdr,stderr,rel_err`.
void write_closed_form_check_csv(std::ostream& out, const ClosedFormCheck& check);

}  // namespace bayes_bound

#endif
