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

#ifndef BAYES_BOUND_COUPLING_FLOW_HPP
#define BAYES_BOUND_COUPLING_FLOW_HPP

#include "bayes_bound/bayes_error.hpp"
#include "bayes_bound/gaussian_model.hpp"
#include "bayes_bound/hdr.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bayes_bound {

/// One coupling block: the active coordinates A are updated as
///   x_A = z_A * exp(s) + tanh(W z_B + b)
/// while the passive coordinates B pass through. Without log-scales the
/// layer is additive (volume preserving).
struct CouplingLayer {
  std::vector<int> active;
  std::vector<int> passive;
  Eigen::MatrixXd weight;  // |A| x |B|
  Eigen::VectorXd bias;    // |A|
  std::optional<Eigen::VectorXd> log_scale;

  /// Builds a layer from its active index set; the passive set is the rest.
  static CouplingLayer make(int dim, std::vector<int> active, Eigen::MatrixXd weight, Eigen::VectorXd bias,
                            std::optional<Eigen::VectorXd> log_scale = std::nullopt);

  Eigen::VectorXd shift(const Eigen::VectorXd& point) const;
  double log_det() const;
};

/// A stack of coupling layers, applied in order by forward().
class CouplingFlow {
 public:
  /// Validates masks and shapes, then checks that inverse(forward(z))
  /// reproduces z to 1e-9 on a few random points.
  CouplingFlow(int dim, std::vector<CouplingLayer> layers);

  static CouplingFlow identity(int dim) { return CouplingFlow(dim, {}); }

  int dim() const { return dim_; }
  const std::vector<CouplingLayer>& layers() const { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& z) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& x) const;
  /// log |det dT/dz|; constant in z for this layer family.
  double log_det_jacobian(const Eigen::VectorXd& z) const;

  /// This flow followed by `next`.
  CouplingFlow then(const CouplingFlow& next) const;

 private:
  int dim_;
  std::vector<CouplingLayer> layers_;
};

/// Seeded random flow with alternating even/odd masks. Weights are
/// N(0, weight_scale^2); log-scales (when affine) are uniform in
/// [-log_scale_range, log_scale_range].
CouplingFlow random_coupling_flow(int dim, int num_layers, std::uint64_t seed, bool affine = true,
                                  double weight_scale = 1.0, double log_scale_range = 0.5);

/// Flow JSON: {"d": int, "layers": [{"mask_a": [...], "w": [[...]], "b": [...],
/// "log_s": [...] | null}, ...]}.
CouplingFlow parse_flow_json(const std::string& text);
std::string encode_flow_json(const CouplingFlow& flow);
CouplingFlow load_flow(const std::string& path);
void save_flow(const CouplingFlow& flow, const std::string& path);

/// log p_j(x) of the pushforward of class j through the flow:
/// log q_j(T^{-1} x) - log |det J_T(T^{-1} x)|.
double pushforward_log_density(const CouplingFlow& flow, const GaussianClassModel& model, ClassIndex j,
                               const Eigen::VectorXd& x, double tau);

/// argmax_j [log pi_j + pushforward_log_density(j)], ties to the lowest index.
ClassIndex pushforward_classify(const CouplingFlow& flow, const GaussianClassModel& model, const Eigen::VectorXd& x,
                                double tau);

struct InvarianceReport {
  BayesErrorEstimate x_space_mc;
  BayesErrorEstimate base_hdr;
  double combined_std_error = 0.0;
  bool pass = false;
};

/// Compares the Monte Carlo Bayes error of the pushforward model (samples
/// pushed through the flow, classified with pushforward densities) against
/// the HDR Bayes error of the base model. Pass when they agree within 3
/// combined standard errors. The Monte Carlo stream uses config.seed.
InvarianceReport invariance_harness(const CouplingFlow& flow, const GaussianClassModel& model, double tau,
                                    std::uint64_t n, const HdrConfig& config);

/// Number of points x = T(z), z drawn from the model, at which the
/// pushforward Bayes classifier disagrees with the base classifier at z.
std::uint64_t classifier_mismatches(const CouplingFlow& flow, const GaussianClassModel& model, double tau,
                                    std::uint64_t n_points, std::uint64_t seed);

}  // namespace bayes_bound

#endif
