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

#include "bayes_bound/model_io.hpp"

#include "bayes_bound/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bayes_bound {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'M', '1'};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <class T>
  T read() {
    if (pos_ + sizeof(T) > bytes_.size()) fail(ErrorKind::format, "GCM file truncated");
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(raw);
  }

  void read_doubles(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = read<double>();
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

template <class T>
void append(std::vector<std::byte>& out, T value) {
  auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

Eigen::MatrixXd expand_covariance(CovarianceKind kind, std::uint32_t d, const std::vector<double>& payload) {
  switch (kind) {
    case CovarianceKind::full: {
      Eigen::MatrixXd cov(d, d);
      for (std::uint32_t r = 0; r < d; ++r)
        for (std::uint32_t c = 0; c < d; ++c) cov(r, c) = payload[std::size_t{r} * d + c];
      return cov;
    }
    case CovarianceKind::diagonal: {
      Eigen::VectorXd diag(d);
      for (std::uint32_t i = 0; i < d; ++i) diag(i) = payload[i];
      return diag.asDiagonal();
    }
    case CovarianceKind::scalar:
      return payload[0] * Eigen::MatrixXd::Identity(d, d);
  }
  fail(ErrorKind::format, "unknown cov_kind");
}

std::size_t payload_size(CovarianceKind kind, std::size_t d) {
  switch (kind) {
    case CovarianceKind::full:
      return d * d;
    case CovarianceKind::diagonal:
      return d;
    case CovarianceKind::scalar:
      return 1;
  }
  return 0;
}

CovarianceKind parse_kind(std::uint64_t raw) {
  if (raw > 2) fail(ErrorKind::format, "cov_kind must be 0, 1 or 2");
  return static_cast<CovarianceKind>(raw);
}

std::vector<double> covariance_payload(const GaussianClassModel& model) {
  const auto& cov = model.covariance();
  const auto d = static_cast<std::size_t>(model.dim());
  std::vector<double> out;
  switch (model.covariance_kind()) {
    case CovarianceKind::full:
      out.reserve(d * d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) out.push_back(cov(r, c));
      break;
    case CovarianceKind::diagonal:
      for (std::size_t i = 0; i < d; ++i) out.push_back(cov(i, i));
      break;
    case CovarianceKind::scalar:
      out.push_back(cov(0, 0));
      break;
  }
  return out;
}

// Builds the model, reporting invariant violations as format errors
// with the original message.
GaussianClassModel assemble(std::uint32_t k, std::uint32_t d, CovarianceKind kind, const std::vector<double>& priors,
                            const std::vector<double>& means, const std::vector<double>& cov) {
  Eigen::MatrixXd m(k, d);
  for (std::uint32_t r = 0; r < k; ++r)
    for (std::uint32_t c = 0; c < d; ++c) m(r, c) = means[std::size_t{r} * d + c];
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(priors.data(), k);
  return GaussianClassModel::create(std::move(m), expand_covariance(kind, d, cov), std::move(p), kind);
}

GaussianClassModel parse_binary(std::span<const std::byte> bytes) {
  Reader in(bytes.subspan(4));
  const auto version = in.read<std::uint32_t>();
  if (version != kGcmVersion) fail(ErrorKind::format, "unsupported GCM version " + std::to_string(version));
  const auto k = in.read<std::uint32_t>();
  const auto d = in.read<std::uint32_t>();
  if (k == 0 || d == 0) fail(ErrorKind::format, "GCM header has K or d equal to zero");
  const CovarianceKind kind = parse_kind(in.read<std::uint8_t>());
  const std::size_t expected = (std::size_t{k} + std::size_t{k} * d + payload_size(kind, d)) * sizeof(double);
  if (bytes.size() - 17 != expected) fail(ErrorKind::format, "GCM payload size does not match header");
  std::vector<double> priors(k), means(std::size_t{k} * d), cov(payload_size(kind, d));
  in.read_doubles(priors.data(), priors.size());
  in.read_doubles(means.data(), means.size());
  in.read_doubles(cov.data(), cov.size());
  return assemble(k, d, kind, priors, means, cov);
}

// Accepts a flat row-major array or an array of rows.
std::vector<double> flatten(const nlohmann::json& node) {
  std::vector<double> out;
  if (node.is_number()) {
    out.push_back(node.get<double>());
    return out;
  }
  if (!node.is_array()) fail(ErrorKind::format, "expected a number or array in model JSON");
  for (const auto& item : node) {
    if (item.is_array()) {
      for (const auto& x : item) out.push_back(x.get<double>());
    } else {
      out.push_back(item.get<double>());
    }
  }
  return out;
}

GaussianClassModel parse_json(std::span<const std::byte> bytes) {
  if (bytes.size() >= kMaxJsonModelBytes) fail(ErrorKind::format, "JSON model files must be under 1 MiB");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(reinterpret_cast<const char*>(bytes.data()),
                                reinterpret_cast<const char*>(bytes.data()) + bytes.size());
    for (const char* key : {"k", "d", "cov_kind", "priors", "means", "cov"})
      if (!doc.contains(key)) fail(ErrorKind::format, std::string("model JSON is missing \"") + key + "\"");
    const auto k = doc.at("k").get<std::int64_t>();
    const auto d = doc.at("d").get<std::int64_t>();
    if (k <= 0 || d <= 0) fail(ErrorKind::format, "model JSON has non-positive k or d");
    const CovarianceKind kind = parse_kind(doc.at("cov_kind").get<std::uint64_t>());
    const auto priors = flatten(doc.at("priors"));
    const auto means = flatten(doc.at("means"));
    const auto cov = flatten(doc.at("cov"));
    if (priors.size() != static_cast<std::size_t>(k)) fail(ErrorKind::format, "priors length does not match k");
    if (means.size() != static_cast<std::size_t>(k * d)) fail(ErrorKind::format, "means size does not match k*d");
    if (cov.size() != payload_size(kind, static_cast<std::size_t>(d)))
      fail(ErrorKind::format, "cov size does not match cov_kind");
    return assemble(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(d), kind, priors, means, cov);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace

GaussianClassModel parse_model(std::span<const std::byte> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return parse_binary(bytes);
  return parse_json(bytes);
}

GaussianClassModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open model file '" + path + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "error reading model file '" + path + "'");
  return parse_model(std::as_bytes(std::span(raw)));
}

std::vector<std::byte> encode_model_binary(const GaussianClassModel& model) {
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  append(out, kGcmVersion);
  append(out, static_cast<std::uint32_t>(model.num_classes()));
  append(out, static_cast<std::uint32_t>(model.dim()));
  append(out, static_cast<std::uint8_t>(model.covariance_kind()));
  for (Eigen::Index j = 0; j < model.priors().size(); ++j) append(out, model.priors()(j));
  for (Eigen::Index r = 0; r < model.means().rows(); ++r)
    for (Eigen::Index c = 0; c < model.means().cols(); ++c) append(out, model.means()(r, c));
  for (double v : covariance_payload(model)) append(out, v);
  return out;
}

std::string encode_model_json(const GaussianClassModel& model) {
  nlohmann::json doc;
  doc["k"] = model.num_classes();
  doc["d"] = model.dim();
  doc["cov_kind"] = static_cast<int>(model.covariance_kind());
  doc["priors"] = std::vector<double>(model.priors().data(), model.priors().data() + model.priors().size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.means().rows(); ++r) {
    std::vector<double> row(model.means().cols());
    for (Eigen::Index c = 0; c < model.means().cols(); ++c) row[c] = model.means()(r, c);
    rows.push_back(row);
  }
  doc["means"] = rows;
  const auto payload = covariance_payload(model);
  if (model.covariance_kind() == CovarianceKind::scalar)
    doc["cov"] = payload[0];
  else
    doc["cov"] = payload;
  return doc.dump();
}

void save_model(const GaussianClassModel& model, const std::string& path, ModelFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  if (format == ModelFormat::binary) {
    const auto bytes = encode_model_binary(model);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  } else {
    const auto text = encode_model_json(model);
    if (text.size() >= kMaxJsonModelBytes) fail(ErrorKind::invalid_argument, "model too large for the JSON format");
    out << text;
  }
  if (!out) fail(ErrorKind::io, "error writing '" + path + "'");
}

}  // namespace bayes_bound
