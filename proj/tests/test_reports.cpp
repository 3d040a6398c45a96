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
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using namespace bayes_bound;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 2.2250738585072014e-308, 1e-200, 0.2397500610934768}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("sweep CSV") {
  const auto m = oracle::symmetric_binary(3, 1.5);
  const std::vector<double> taus{0.5, 2.0};
  const auto curve = temperature_sweep(m, taus, HdrConfig{});
  std::ostringstream out;
  write_sweep_csv(out, curve);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"tau", "bayes_error", "stderr", "method", "levels_total"});
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& r = rows[i + 1];
    REQUIRE(r.size() == 5);
    CHECK(std::strtod(r[0].c_str(), nullptr) == curve.taus[i]);
    CHECK(std::strtod(r[1].c_str(), nullptr) == curve.estimates[i].error);
    CHECK(std::strtod(r[2].c_str(), nullptr) == curve.estimates[i].std_error);
    CHECK(r[3] == "hdr");
    CHECK(std::stoul(r[4]) == curve.estimates[i].levels_total());
  }
}

TEST_CASE("closed-form check on unit-vector means in d=784") {
  const std::vector<double> taus{0.5, 1.0, 2.0, 4.0};
  const auto check = validate_binary_closed_form(784, taus, HdrConfig{}, 0);
  CHECK(check.pass);
  const auto model = generate_synthetic(2, 784, MeanScheme::unit_sphere, 0);
  for (const auto& row : check.rows) {
    CHECK(!row.log_space);
    CHECK(row.exact == doctest::Approx(oracle::binary_error(whitened_distance(model, ClassIndex{0}, ClassIndex{1}), row.tau))
                           .epsilon(1e-13));
    CHECK(row.rel_err <= 0.05);
  }
  std::ostringstream out;
  write_closed_form_check_csv(out, check);
  const auto rows = parse_csv(out.str());
  CHECK(rows[0] == std::vector<std::string>{"tau", "exact", "hdr", "stderr", "rel_err"});
  CHECK(rows.size() == 5);
}

TEST_CASE("closed-form check: wide and far-tail temperatures") {
  const std::vector<double> hot{10.0};
  const auto wide = validate_binary_closed_form(2, hot, HdrConfig{}, 3);
  CHECK(wide.pass);
  CHECK(wide.rows[0].exact > 0.45);

  const std::vector<double> cold{0.05};
  const auto tail = validate_binary_closed_form(784, cold, HdrConfig{}, 0);
  REQUIRE(tail.rows.size() == 1);
  CHECK(tail.rows[0].exact < kLogSpaceCutoff);
  CHECK(tail.rows[0].log_space);
  CHECK(tail.pass);
}

TEST_CASE("closed-form check fails honestly on a starved budget") {
  HdrConfig cfg;
  cfg.n_per_level = 16;
  cfg.repeats = 1;
  const std::vector<double> taus{0.3};
  const auto check = validate_binary_closed_form(8, taus, cfg, 1, 1e-6);
  CHECK(!check.pass);
}
