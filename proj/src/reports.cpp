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

#include "bayes_bound/reports.hpp"

#include "bayes_bound/error.hpp"
#include "bayes_bound/gaussian_model.hpp"

#include <cmath>
#include <cstdio>

namespace bayes_bound {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_sweep_csv(std::ostream& out, const TemperatureCurve& curve) {
  out << "tau,bayes_error,stderr,method,levels_total\n";
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    const auto& e = curve.estimates[i];
    out << format_double(curve.taus[i]) << ',' << format_double(e.error) << ',' << format_double(e.std_error) << ','
        << to_string(e.method) << ',' << e.levels_total() << '\n';
  }
}

ClosedFormCheck validate_binary_closed_form(int dim, std::span<const double> taus, const HdrConfig& config,
                                            std::uint64_t model_seed, double tolerance) {
  require(dim >= 2, "dimension must be at least 2");
  require(!taus.empty(), "no temperatures given");
  const GaussianClassModel model = generate_synthetic(2, dim, MeanScheme::unit_sphere, model_seed);
  ClosedFormCheck check;
  check.tolerance = tolerance;
  check.pass = true;
  for (double tau : taus) {
    require(tau > 0.0, "temperatures must be positive");
    const BayesErrorEstimate est = compute_bayes_error(model, tau, config);
    ClosedFormCheckRow row;
    row.tau = tau;
    row.exact = binary_closed_form(model, tau);
    row.hdr = est.error;
    row.std_error = est.std_error;
    if (row.exact < kLogSpaceCutoff) {
      const double log_exact = binary_closed_form_log(model, tau);
      row.log_space = true;
      row.rel_err = std::abs(est.log_error - log_exact) / std::abs(log_exact);
    } else {
      row.rel_err = std::abs(est.error - row.exact) / row.exact;
    }
    if (!(row.rel_err <= tolerance)) check.pass = false;
    check.rows.push_back(row);
  }
  return check;
}

void write_closed_form_check_csv(std::ostream& out, const ClosedFormCheck& check) {
  out << "tau,exact,hdr,stderr,rel_err\n";
  for (const auto& r : check.rows) {
    out << format_double(r.tau) << ',' << format_double(r.exact) << ',' << format_double(r.hdr) << ','
        << format_double(r.std_error) << ',' << format_double(r.rel_err) << '\n';
  }
}

}  // namespace bayes_bound
