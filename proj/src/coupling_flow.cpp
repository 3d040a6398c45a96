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

#include "bayes_bound/coupling_flow.hpp"

#include "bayes_bound/error.hpp"
#include "bayes_bound/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bayes_bound {

namespace {

constexpr double kRoundTripTolerance = 1e-9;
constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

}  // namespace

CouplingLayer CouplingLayer::make(int dim, std::vector<int> active, Eigen::MatrixXd weight, Eigen::VectorXd bias,
                                  std::optional<Eigen::VectorXd> log_scale) {
  require(dim >= 1, "flow dimension must be positive");
  std::vector<bool> in_a(dim, false);
  for (int i : active) {
    require(i >= 0 && i < dim, "mask index out of range");
    require(!in_a[i], "mask contains a duplicate index");
    in_a[i] = true;
  }
  std::sort(active.begin(), active.end());
  CouplingLayer layer;
  for (int i = 0; i < dim; ++i)
    if (!in_a[i]) layer.passive.push_back(i);
  layer.active = std::move(active);
  require(!layer.active.empty(), "coupling layer has no active coordinates");
  if (dim >= 2) require(!layer.passive.empty(), "coupling layer has no passive coordinates");
  const auto na = static_cast<Eigen::Index>(layer.active.size());
  const auto nb = static_cast<Eigen::Index>(layer.passive.size());
  require(weight.rows() == na && weight.cols() == nb, "coupling weight must be |A| x |B|");
  require(bias.size() == na, "coupling bias must have |A| entries");
  require(weight.allFinite() && bias.allFinite(), "coupling parameters must be finite");
  if (log_scale) {
    require(log_scale->size() == na, "log-scales must have |A| entries");
    require(log_scale->allFinite(), "log-scales must be finite");
  }
  layer.weight = std::move(weight);
  layer.bias = std::move(bias);
  layer.log_scale = std::move(log_scale);
  return layer;
}

Eigen::VectorXd CouplingLayer::shift(const Eigen::VectorXd& point) const {
  return (weight * gather(point, passive) + bias).array().tanh().matrix();
}

double CouplingLayer::log_det() const { return log_scale ? log_scale->sum() : 0.0; }

CouplingFlow::CouplingFlow(int dim, std::vector<CouplingLayer> layers) : dim_(dim), layers_(std::move(layers)) {
  require(dim >= 1, "flow dimension must be positive");
  for (const auto& layer : layers_) {
    require(layer.active.size() + layer.passive.size() == static_cast<std::size_t>(dim),
            "coupling mask does not partition the coordinates");
  }
  Rng rng(derive_seed(0xf10e, {static_cast<std::uint64_t>(dim), layers_.size()}));
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::VectorXd z = 2.0 * rng.normal_vector(dim);
    const Eigen::VectorXd back = inverse(forward(z));
    const double err = (back - z).cwiseAbs().maxCoeff();
    if (!(err <= kRoundTripTolerance * std::max(1.0, z.cwiseAbs().maxCoeff())))
      fail(ErrorKind::numerical, "flow failed the inverse(forward(z)) round-trip check");
  }
}

Eigen::VectorXd CouplingFlow::forward(const Eigen::VectorXd& z) const {
  require(z.size() == dim_, "input dimension does not match the flow");
  Eigen::VectorXd x = z;
  for (const auto& layer : layers_) {
    const Eigen::VectorXd t = layer.shift(x);
    for (std::size_t i = 0; i < layer.active.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double scale = layer.log_scale ? std::exp((*layer.log_scale)(ii)) : 1.0;
      x(layer.active[i]) = x(layer.active[i]) * scale + t(ii);
    }
  }
  return x;
}

Eigen::VectorXd CouplingFlow::inverse(const Eigen::VectorXd& x) const {
  require(x.size() == dim_, "input dimension does not match the flow");
  Eigen::VectorXd z = x;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    const auto& layer = *it;
    const Eigen::VectorXd t = layer.shift(z);
    for (std::size_t i = 0; i < layer.active.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double inv_scale = layer.log_scale ? std::exp(-(*layer.log_scale)(ii)) : 1.0;
      z(layer.active[i]) = (z(layer.active[i]) - t(ii)) * inv_scale;
    }
  }
  return z;
}

double CouplingFlow::log_det_jacobian(const Eigen::VectorXd& z) const {
  require(z.size() == dim_, "input dimension does not match the flow");
  double total = 0.0;
  for (const auto& layer : layers_) total += layer.log_det();
  return total;
}

CouplingFlow CouplingFlow::then(const CouplingFlow& next) const {
  require(next.dim() == dim_, "cannot compose flows of different dimension");
  std::vector<CouplingLayer> all = layers_;
  all.insert(all.end(), next.layers_.begin(), next.layers_.end());
  return CouplingFlow(dim_, std::move(all));
}

CouplingFlow random_coupling_flow(int dim, int num_layers, std::uint64_t seed, bool affine, double weight_scale,
                                  double log_scale_range) {
  require(dim >= 1, "flow dimension must be positive");
  require(num_layers >= 0, "layer count must be nonnegative");
  Rng rng(derive_seed(seed, {0xc0c0}));
  std::vector<CouplingLayer> layers;
  for (int l = 0; l < num_layers; ++l) {
    std::vector<int> active;
    for (int i = 0; i < dim; ++i)
      if (dim == 1 || i % 2 == l % 2) active.push_back(i);
    const auto na = static_cast<Eigen::Index>(active.size());
    const Eigen::Index nb = dim - na;
    Eigen::MatrixXd w(na, nb);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = weight_scale * rng.normal();
    Eigen::VectorXd b(na);
    for (Eigen::Index i = 0; i < na; ++i) b(i) = weight_scale * rng.normal();
    std::optional<Eigen::VectorXd> s;
    if (affine) {
      Eigen::VectorXd ls(na);
      for (Eigen::Index i = 0; i < na; ++i) ls(i) = log_scale_range * (2.0 * rng.uniform() - 1.0);
      s = ls;
    }
    layers.push_back(CouplingLayer::make(dim, std::move(active), std::move(w), std::move(b), std::move(s)));
  }
  return CouplingFlow(dim, std::move(layers));
}

CouplingFlow parse_flow_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const int d = doc.at("d").get<int>();
    require(d >= 1, "flow dimension must be positive");
    std::vector<CouplingLayer> layers;
    for (const auto& node : doc.at("layers")) {
      auto active = node.at("mask_a").get<std::vector<int>>();
      const auto rows = node.at("w").get<std::vector<std::vector<double>>>();
      const auto bias = node.at("b").get<std::vector<double>>();
      const auto na = static_cast<Eigen::Index>(active.size());
      const Eigen::Index nb = d - na;
      if (static_cast<Eigen::Index>(rows.size()) != na) fail(ErrorKind::format, "flow weight must have |A| rows");
      Eigen::MatrixXd w(na, std::max<Eigen::Index>(nb, 0));
      for (Eigen::Index r = 0; r < na; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != nb) fail(ErrorKind::format, "flow weight must have |B| columns");
        for (Eigen::Index c = 0; c < nb; ++c) w(r, c) = rows[r][c];
      }
      Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
      std::optional<Eigen::VectorXd> s;
      if (node.contains("log_s") && !node.at("log_s").is_null()) {
        const auto ls = node.at("log_s").get<std::vector<double>>();
        s = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
      }
      layers.push_back(CouplingLayer::make(d, std::move(active), std::move(w), std::move(b), std::move(s)));
    }
    return CouplingFlow(d, std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("malformed flow JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) fail(ErrorKind::format, e.what());
    throw;
  }
}

std::string encode_flow_json(const CouplingFlow& flow) {
  nlohmann::json doc;
  doc["d"] = flow.dim();
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : flow.layers()) {
    nlohmann::json node;
    node["mask_a"] = layer.active;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      std::vector<double> row(layer.weight.cols());
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) row[c] = layer.weight(r, c);
      rows.push_back(row);
    }
    node["w"] = rows;
    node["b"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    if (layer.log_scale)
      node["log_s"] = std::vector<double>(layer.log_scale->data(), layer.log_scale->data() + layer.log_scale->size());
    else
      node["log_s"] = nullptr;
    doc["layers"].push_back(node);
  }
  return doc.dump();
}

CouplingFlow load_flow(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open flow file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_flow_json(buf.str());
}

void save_flow(const CouplingFlow& flow, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << encode_flow_json(flow);
  if (!out) fail(ErrorKind::io, "error writing '" + path + "'");
}

double pushforward_log_density(const CouplingFlow& flow, const GaussianClassModel& model, ClassIndex j,
                               const Eigen::VectorXd& x, double tau) {
  require(flow.dim() == model.dim(), "flow and model dimensions differ");
  const Eigen::VectorXd z = flow.inverse(x);
  return log_density(model, j, z, tau) - flow.log_det_jacobian(z);
}

ClassIndex pushforward_classify(const CouplingFlow& flow, const GaussianClassModel& model, const Eigen::VectorXd& x,
                                double tau) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < model.num_classes(); ++j) {
    const double pj = model.priors()(j);
    if (pj <= 0.0) continue;
    const double score = std::log(pj) + pushforward_log_density(flow, model, ClassIndex{j}, x, tau);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return ClassIndex{best};
}

InvarianceReport invariance_harness(const CouplingFlow& flow, const GaussianClassModel& model, double tau,
                                    std::uint64_t n, const HdrConfig& config) {
  require(n >= 10000, "invariance harness needs at least 1e4 samples");
  require(flow.dim() == model.dim(), "flow and model dimensions differ");
  require(tau > 0.0, "temperature must be positive");
  const int k_count = model.num_classes();
  const std::vector<double> weights(model.priors().data(), model.priors().data() + k_count);

  std::vector<std::uint64_t> sizes;
  for (std::uint64_t done = 0; done < n; done += kChunk) sizes.push_back(std::min(kChunk, n - done));
  std::vector<std::uint64_t> wrong(sizes.size(), 0);
  parallel_for(sizes.size(), config.threads, [&](std::size_t c) {
    Rng rng(derive_seed(config.seed, {0x1f10, c}));
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    for (std::uint64_t i = 0; i < sizes[c]; ++i) {
      const int y = pick(rng.engine());
      const Eigen::VectorXd x = flow.forward(sample(model, ClassIndex{y}, tau, rng));
      if (pushforward_classify(flow, model, x, tau).value != y) ++wrong[c];
    }
  });

  InvarianceReport report;
  auto& mc = report.x_space_mc;
  mc.tau = tau;
  mc.method = EstimateMethod::monte_carlo;
  std::uint64_t total = 0;
  for (auto w : wrong) total += w;
  mc.error = static_cast<double>(total) / static_cast<double>(n);
  mc.log_error = std::log(mc.error);
  mc.std_error = std::sqrt(mc.error * (1.0 - mc.error) / static_cast<double>(n));

  report.base_hdr = compute_bayes_error(model, tau, config);
  report.combined_std_error = std::hypot(mc.std_error, report.base_hdr.std_error);
  report.pass = std::abs(mc.error - report.base_hdr.error) <= 3.0 * report.combined_std_error;
  return report;
}

std::uint64_t classifier_mismatches(const CouplingFlow& flow, const GaussianClassModel& model, double tau,
                                    std::uint64_t n_points, std::uint64_t seed) {
  require(flow.dim() == model.dim(), "flow and model dimensions differ");
  Rng rng(derive_seed(seed, {0xe9}));
  const int k_count = model.num_classes();
  const std::vector<double> weights(model.priors().data(), model.priors().data() + k_count);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < n_points; ++i) {
    const Eigen::VectorXd z = sample(model, ClassIndex{pick(rng.engine())}, tau, rng);
    const Eigen::VectorXd x = flow.forward(z);
    if (pushforward_classify(flow, model, x, tau) != bayes_classify(model, flow.inverse(x), tau)) ++mismatches;
  }
  return mismatches;
}

}  // namespace bayes_bound
