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

#include "bayes_bound/bayes_bound.h"

#include "bayes_bound/bayes_error.hpp"
#include "bayes_bound/coupling_flow.hpp"
#include "bayes_bound/error.hpp"
#include "bayes_bound/gaussian_model.hpp"
#include "bayes_bound/model_io.hpp"
#include "bayes_bound/reports.hpp"

#include <fstream>
#include <iostream>
#include <new>
#include <string>

using namespace bayes_bound;

struct bb_model {
  GaussianClassModel value;
};
struct bb_flow {
  CouplingFlow value;
};
struct bb_curve {
  TemperatureCurve value;
};
struct bb_check {
  ClosedFormCheck value;
};

namespace {

thread_local std::string g_last_error;

bb_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
      return BB_ERR_INVALID_ARGUMENT;
    case ErrorKind::io:
      return BB_ERR_IO;
    case ErrorKind::format:
      return BB_ERR_FORMAT;
    case ErrorKind::numerical:
      return BB_ERR_NUMERICAL;
    case ErrorKind::out_of_range:
      return BB_ERR_OUT_OF_RANGE;
  }
  return BB_ERR_INTERNAL;
}

template <class Fn>
bb_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return BB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BB_ERR_INTERNAL;
  }
}

void not_null(const void* p, const char* what) {
  if (!p) fail(ErrorKind::invalid_argument, std::string(what) + " must not be null");
}

HdrConfig to_config(const bb_hdr_config* c) {
  HdrConfig cfg;
  if (!c) return cfg;
  cfg.n_per_level = c->n_per_level;
  cfg.rho = c->rho;
  cfg.repeats = c->repeats;
  cfg.max_levels = c->max_levels;
  cfg.seed = c->seed;
  cfg.thin = c->thin;
  cfg.burn_in = c->burn_in;
  cfg.threads = c->threads;
  return cfg;
}

Eigen::VectorXd vec(const double* data, int n) { return Eigen::Map<const Eigen::VectorXd>(data, n); }

void fill(const BayesErrorEstimate& e, bb_bayes_result* out) {
  out->error = e.error;
  out->log_error = e.log_error;
  out->std_error = e.std_error;
  out->tau = e.tau;
  out->method = static_cast<int>(e.method);
  out->levels_total = static_cast<uint32_t>(e.levels_total());
  out->has_closed_form = e.closed_form.has_value();
  out->closed_form = e.closed_form.value_or(0.0);
}

ClassIndex class_index(const bb_model* m, uint32_t j) {
  const ClassIndex idx{static_cast<int>(j)};
  m->value.check(idx);
  return idx;
}

template <class Writer>
void write_to(const char* path, Writer&& writer) {
  not_null(path, "path");
  if (std::string(path) == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::io, std::string("cannot open '") + path + "' for writing");
  writer(out);
  if (!out) fail(ErrorKind::io, std::string("error writing '") + path + "'");
}

}  // namespace

extern "C" {

const char* bb_version(void) { return "0.1.0"; }

const char* bb_last_error(void) { return g_last_error.c_str(); }

const char* bb_status_string(bb_status status) {
  switch (status) {
    case BB_OK:
      return "ok";
    case BB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case BB_ERR_IO:
      return "i/o error";
    case BB_ERR_FORMAT:
      return "format error";
    case BB_ERR_NUMERICAL:
      return "numerical failure";
    case BB_ERR_OUT_OF_RANGE:
      return "out of range";
    case BB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void bb_hdr_config_default(bb_hdr_config* config) {
  if (!config) return;
  const HdrConfig d;
  config->n_per_level = static_cast<uint32_t>(d.n_per_level);
  config->rho = d.rho;
  config->repeats = static_cast<uint32_t>(d.repeats);
  config->max_levels = static_cast<uint32_t>(d.max_levels);
  config->seed = d.seed;
  config->thin = static_cast<uint32_t>(d.thin);
  config->burn_in = static_cast<uint32_t>(d.burn_in);
  config->threads = static_cast<uint32_t>(d.threads);
}

bb_status bb_model_create(uint32_t k, uint32_t d, const double* priors, const double* means, int cov_kind,
                          const double* cov, bb_model** out) {
  return guarded([&] {
    not_null(out, "out");
    not_null(priors, "priors");
    not_null(means, "means");
    not_null(cov, "cov");
    require(k >= 1 && d >= 1, "k and d must be positive");
    require(cov_kind >= 0 && cov_kind <= 2, "cov_kind must be 0, 1 or 2");
    Eigen::MatrixXd m(k, d);
    for (uint32_t r = 0; r < k; ++r)
      for (uint32_t c = 0; c < d; ++c) m(r, c) = means[std::size_t{r} * d + c];
    Eigen::MatrixXd sigma(d, d);
    const auto kind = static_cast<CovarianceKind>(cov_kind);
    switch (kind) {
      case CovarianceKind::full:
        for (uint32_t r = 0; r < d; ++r)
          for (uint32_t c = 0; c < d; ++c) sigma(r, c) = cov[std::size_t{r} * d + c];
        break;
      case CovarianceKind::diagonal:
        sigma = vec(cov, static_cast<int>(d)).asDiagonal();
        break;
      case CovarianceKind::scalar:
        sigma = cov[0] * Eigen::MatrixXd::Identity(d, d);
        break;
    }
    *out = new bb_model{GaussianClassModel::create(std::move(m), std::move(sigma), vec(priors, static_cast<int>(k)), kind)};
  });
}

bb_status bb_model_load(const char* path, bb_model** out) {
  return guarded([&] {
    not_null(out, "out");
    not_null(path, "path");
    *out = new bb_model{load_model(path)};
  });
}

bb_status bb_model_save(const bb_model* model, const char* path, int format) {
  return guarded([&] {
    not_null(model, "model");
    not_null(path, "path");
    save_model(model->value, path, format == BB_FORMAT_JSON ? ModelFormat::json : ModelFormat::binary);
  });
}

bb_status bb_model_generate(uint32_t k, uint32_t d, int mean_scheme, uint64_t seed, bb_model** out) {
  return guarded([&] {
    not_null(out, "out");
    require(mean_scheme == BB_MEANS_UNIT_SPHERE || mean_scheme == BB_MEANS_SIMPLEX, "unknown mean scheme");
    const MeanScheme scheme = mean_scheme == BB_MEANS_SIMPLEX ? MeanScheme::simplex : MeanScheme::unit_sphere;
    *out = new bb_model{generate_synthetic(static_cast<int>(k), static_cast<int>(d), scheme, seed)};
  });
}

void bb_model_free(bb_model* model) { delete model; }

uint32_t bb_model_num_classes(const bb_model* model) {
  return model ? static_cast<uint32_t>(model->value.num_classes()) : 0;
}

uint32_t bb_model_dim(const bb_model* model) { return model ? static_cast<uint32_t>(model->value.dim()) : 0; }

void bb_model_priors(const bb_model* model, double* out) {
  if (!model || !out) return;
  const auto& p = model->value.priors();
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p(i);
}

void bb_model_means(const bb_model* model, double* out) {
  if (!model || !out) return;
  const auto& m = model->value.means();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
}

void bb_model_covariance(const bb_model* model, double* out) {
  if (!model || !out) return;
  const auto& s = model->value.covariance();
  for (Eigen::Index r = 0; r < s.rows(); ++r)
    for (Eigen::Index c = 0; c < s.cols(); ++c) out[r * s.cols() + c] = s(r, c);
}

bb_status bb_log_density(const bb_model* model, uint32_t j, const double* x, double tau, double* out) {
  return guarded([&] {
    not_null(model, "model");
    not_null(x, "x");
    not_null(out, "out");
    *out = log_density(model->value, class_index(model, j), vec(x, model->value.dim()), tau);
  });
}

bb_status bb_classify(const bb_model* model, const double* x, double tau, uint32_t* out) {
  return guarded([&] {
    not_null(model, "model");
    not_null(x, "x");
    not_null(out, "out");
    *out = static_cast<uint32_t>(bayes_classify(model->value, vec(x, model->value.dim()), tau).value);
  });
}

bb_status bb_binary_closed_form(const bb_model* model, double tau, double* error, double* log_error) {
  return guarded([&] {
    not_null(model, "model");
    not_null(error, "error");
    *error = binary_closed_form(model->value, tau);
    if (log_error) *log_error = binary_closed_form_log(model->value, tau);
  });
}

bb_status bb_compute_bayes_error(const bb_model* model, double tau, const bb_hdr_config* config,
                                 bb_bayes_result* out, bb_class_term* per_class) {
  return guarded([&] {
    not_null(model, "model");
    not_null(out, "out");
    const BayesErrorEstimate est = compute_bayes_error(model->value, tau, to_config(config));
    fill(est, out);
    if (per_class) {
      for (std::size_t k = 0; k < est.per_class.size(); ++k) {
        const ClassTerm& t = est.per_class[k];
        per_class[k] = {t.p,
                        t.log_miss,
                        t.std_error,
                        static_cast<uint32_t>(t.levels),
                        t.degenerate_steps,
                        t.via_complement,
                        t.reduced_dim,
                        static_cast<uint32_t>(t.num_constraints)};
      }
    }
  });
}

bb_status bb_monte_carlo_bayes_error(const bb_model* model, double tau, uint64_t n, uint64_t seed, uint32_t threads,
                                     bb_bayes_result* out) {
  return guarded([&] {
    not_null(model, "model");
    not_null(out, "out");
    fill(monte_carlo_bayes_error(model->value, tau, n, seed, threads), out);
  });
}

bb_status bb_one_vs_all_error(const bb_model* model, uint32_t j, double tau, uint64_t n, uint64_t seed, int weights,
                              uint32_t threads, double* error, double* std_error) {
  return guarded([&] {
    not_null(model, "model");
    not_null(error, "error");
    require(weights == BB_WEIGHTS_BALANCED || weights == BB_WEIGHTS_NATURAL, "unknown weight mode");
    const McError r = one_vs_all_error(model->value, class_index(model, j), tau, n, seed,
                                       weights == BB_WEIGHTS_NATURAL ? OneVsAllWeights::natural
                                                                     : OneVsAllWeights::balanced,
                                       threads);
    *error = r.error;
    if (std_error) *std_error = r.std_error;
  });
}

bb_status bb_tau_grid(double lo, double hi, uint32_t steps, int geometric, double* out) {
  return guarded([&] {
    not_null(out, "out");
    const auto grid = geometric ? geometric_grid(lo, hi, steps) : linear_grid(lo, hi, steps);
    std::copy(grid.begin(), grid.end(), out);
  });
}

bb_status bb_temperature_sweep(const bb_model* model, const double* taus, size_t n_taus, const bb_hdr_config* config,
                               bb_curve** out) {
  return guarded([&] {
    not_null(model, "model");
    not_null(taus, "taus");
    not_null(out, "out");
    *out = new bb_curve{temperature_sweep(model->value, std::span<const double>(taus, n_taus), to_config(config))};
  });
}

size_t bb_curve_size(const bb_curve* curve) { return curve ? curve->value.taus.size() : 0; }

bb_status bb_curve_point(const bb_curve* curve, size_t i, bb_bayes_result* out) {
  return guarded([&] {
    not_null(curve, "curve");
    not_null(out, "out");
    require(i < curve->value.estimates.size(), "curve index out of range");
    fill(curve->value.estimates[i], out);
  });
}

size_t bb_curve_num_warnings(const bb_curve* curve) { return curve ? curve->value.warnings.size() : 0; }

const char* bb_curve_warning(const bb_curve* curve, size_t i) {
  if (!curve || i >= curve->value.warnings.size()) return nullptr;
  return curve->value.warnings[i].c_str();
}

bb_status bb_curve_write_csv(const bb_curve* curve, const char* path) {
  return guarded([&] {
    not_null(curve, "curve");
    write_to(path, [&](std::ostream& os) { write_sweep_csv(os, curve->value); });
  });
}

void bb_curve_free(bb_curve* curve) { delete curve; }

bb_status bb_invert_temperature(const bb_model* model, double target, double tau_lo, double tau_hi, double tol,
                                double tol_error, const bb_hdr_config* config, bb_inversion* out) {
  return guarded([&] {
    not_null(model, "model");
    not_null(out, "out");
    InversionOptions options;
    options.tol_error = tol_error;
    const InversionResult r = invert_temperature(model->value, target, tau_lo, tau_hi, tol, to_config(config), options);
    out->tau = r.tau;
    fill(r.estimate, &out->estimate);
    out->evaluations = static_cast<uint32_t>(r.evaluations);
    out->repeats_used = static_cast<uint32_t>(r.repeats_used);
    out->warned_floor = !r.warnings.empty();
  });
}

bb_status bb_validate_binary_closed_form(uint32_t dim, const double* taus, size_t n_taus, const bb_hdr_config* config,
                                         uint64_t model_seed, bb_check** out) {
  return guarded([&] {
    not_null(taus, "taus");
    not_null(out, "out");
    *out = new bb_check{validate_binary_closed_form(static_cast<int>(dim), std::span<const double>(taus, n_taus),
                                                    to_config(config), model_seed)};
  });
}

size_t bb_check_size(const bb_check* check) { return check ? check->value.rows.size() : 0; }

bb_status bb_check_row_at(const bb_check* check, size_t i, bb_check_row* out) {
  return guarded([&] {
    not_null(check, "check");
    not_null(out, "out");
    require(i < check->value.rows.size(), "row index out of range");
    const auto& r = check->value.rows[i];
    *out = {r.tau, r.exact, r.hdr, r.std_error, r.rel_err, r.log_space};
  });
}

int bb_check_passed(const bb_check* check) { return check && check->value.pass; }

bb_status bb_check_write_csv(const bb_check* check, const char* path) {
  return guarded([&] {
    not_null(check, "check");
    write_to(path, [&](std::ostream& os) { write_closed_form_check_csv(os, check->value); });
  });
}

void bb_check_free(bb_check* check) { delete check; }

bb_status bb_flow_load(const char* path, bb_flow** out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(out, "out");
    *out = new bb_flow{load_flow(path)};
  });
}

bb_status bb_flow_save(const bb_flow* flow, const char* path) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(path, "path");
    save_flow(flow->value, path);
  });
}

bb_status bb_flow_random(uint32_t d, uint32_t num_layers, uint64_t seed, int affine, bb_flow** out) {
  return guarded([&] {
    not_null(out, "out");
    *out = new bb_flow{random_coupling_flow(static_cast<int>(d), static_cast<int>(num_layers), seed, affine != 0)};
  });
}

void bb_flow_free(bb_flow* flow) { delete flow; }

uint32_t bb_flow_dim(const bb_flow* flow) { return flow ? static_cast<uint32_t>(flow->value.dim()) : 0; }

uint32_t bb_flow_num_layers(const bb_flow* flow) {
  return flow ? static_cast<uint32_t>(flow->value.layers().size()) : 0;
}

bb_status bb_flow_forward(const bb_flow* flow, const double* z, double* x) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(z, "z");
    not_null(x, "x");
    const Eigen::VectorXd r = flow->value.forward(vec(z, flow->value.dim()));
    std::copy(r.data(), r.data() + r.size(), x);
  });
}

bb_status bb_flow_inverse(const bb_flow* flow, const double* x, double* z) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(x, "x");
    not_null(z, "z");
    const Eigen::VectorXd r = flow->value.inverse(vec(x, flow->value.dim()));
    std::copy(r.data(), r.data() + r.size(), z);
  });
}

bb_status bb_flow_log_det(const bb_flow* flow, const double* z, double* out) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(z, "z");
    not_null(out, "out");
    *out = flow->value.log_det_jacobian(vec(z, flow->value.dim()));
  });
}

bb_status bb_pushforward_log_density(const bb_flow* flow, const bb_model* model, uint32_t j, const double* x,
                                     double tau, double* out) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(model, "model");
    not_null(x, "x");
    not_null(out, "out");
    *out = pushforward_log_density(flow->value, model->value, class_index(model, j), vec(x, flow->value.dim()), tau);
  });
}

bb_status bb_invariance_harness(const bb_flow* flow, const bb_model* model, double tau, uint64_t n,
                                const bb_hdr_config* config, bb_invariance_report* out) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(model, "model");
    not_null(out, "out");
    const InvarianceReport r = invariance_harness(flow->value, model->value, tau, n, to_config(config));
    *out = {r.x_space_mc.error,       r.x_space_mc.std_error, r.base_hdr.error,
            r.base_hdr.std_error,     r.combined_std_error,   r.pass};
  });
}

bb_status bb_classifier_mismatches(const bb_flow* flow, const bb_model* model, double tau, uint64_t n_points,
                                   uint64_t seed, uint64_t* out) {
  return guarded([&] {
    not_null(flow, "flow");
    not_null(model, "model");
    not_null(out, "out");
    *out = classifier_mismatches(flow->value, model->value, tau, n_points, seed);
  });
}

}  // extern "C"
