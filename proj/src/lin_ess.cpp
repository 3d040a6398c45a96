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

#include "bayes_bound/lin_ess.hpp"

#include "bayes_bound/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace bayes_bound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEndpointSlack = 1e-9;

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

struct Event {
  double angle;
  int delta;
};

// Intersection of arcs (each given by wrapped start and length) via an
// endpoint sweep over [0, 2pi).
AngleIntervalSet intersect_arcs(const std::vector<std::pair<double, double>>& arcs) {
  AngleIntervalSet out;
  if (arcs.empty()) {
    out.intervals.push_back({0.0, kTwoPi});
    out.total_measure = kTwoPi;
    return out;
  }
  std::vector<Event> events;
  events.reserve(4 * arcs.size());
  for (const auto& [start, length] : arcs) {
    const double end = start + length;
    if (end <= kTwoPi) {
      events.push_back({start, +1});
      events.push_back({end, -1});
    } else {
      events.push_back({start, +1});
      events.push_back({kTwoPi, -1});
      events.push_back({0.0, +1});
      events.push_back({end - kTwoPi, -1});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.angle < b.angle; });
  const int needed = static_cast<int>(arcs.size());
  int count = 0;
  double prev = 0.0;
  for (const auto& e : events) {
    if (count == needed && e.angle > prev) out.intervals.push_back({prev, e.angle});
    count += e.delta;
    prev = e.angle;
  }
  if (count == needed && kTwoPi > prev) out.intervals.push_back({prev, kTwoPi});
  for (const auto& iv : out.intervals) out.total_measure += iv.hi - iv.lo;
  return out;
}

// Rounding at arc endpoints can leave theta = 0 (the current state) just
// outside; pull the nearest endpoint onto it.
void include_origin(AngleIntervalSet& set) {
  if (set.empty() || set.contains(0.0)) return;
  auto& first = set.intervals.front();
  auto& last = set.intervals.back();
  const double gap_first = first.lo;
  const double gap_last = kTwoPi - last.hi;
  if (gap_first <= gap_last && gap_first < kEndpointSlack) {
    set.total_measure += first.lo;
    first.lo = 0.0;
  } else if (gap_last < kEndpointSlack) {
    set.total_measure += kTwoPi - last.hi;
    last.hi = kTwoPi;
  }
}

}  // namespace

bool AngleIntervalSet::contains(double theta) const {
  const double t = wrap(theta);
  for (const auto& iv : intervals)
    if (t >= iv.lo && t < iv.hi) return true;
  return false;
}

LinearEllipticalSlice::LinearEllipticalSlice(const HalfSpaceSet& set) {
  require(!set.forced_empty, "cannot sample from an empty constraint set");
  const auto m = static_cast<Eigen::Index>(set.constraints.size());
  normals_.resize(m, set.dim);
  offsets_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    normals_.row(i) = set.constraints[i].normal.transpose();
    offsets_(i) = set.constraints[i].offset;
  }
}

AngleIntervalSet LinearEllipticalSlice::active_intervals(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  const Eigen::VectorXd ax = normals_ * x;
  const Eigen::VectorXd av = normals_ * v;
  std::vector<std::pair<double, double>> arcs;
  arcs.reserve(static_cast<std::size_t>(ax.size()));
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    // Along the ellipse the constraint reads rho cos(theta - phi) + c > 0.
    const double c = offsets_(i) + shift_;
    const double rho = std::hypot(ax(i), av(i));
    if (c >= rho) continue;
    if (c <= -rho) return {};
    const double phi = std::atan2(av(i), ax(i));
    const double alpha = std::acos(-c / rho);
    arcs.emplace_back(wrap(phi - alpha), 2.0 * alpha);
  }
  AngleIntervalSet out = intersect_arcs(arcs);
  include_origin(out);
  return out;
}

void LinearEllipticalSlice::step(Eigen::VectorXd& x, Rng& rng, EssDiagnostics* diag) const {
  const Eigen::VectorXd v = rng.normal_vector(x.size());
  const AngleIntervalSet active = active_intervals(x, v);
  if (diag) ++diag->steps;
  if (active.empty()) {
    if (diag) ++diag->degenerate_steps;
    return;
  }
  double target = rng.uniform() * active.total_measure;
  double theta = active.intervals.back().hi;
  for (const auto& iv : active.intervals) {
    const double len = iv.hi - iv.lo;
    if (target < len) {
      theta = iv.lo + target;
      break;
    }
    target -= len;
  }
  Eigen::VectorXd next = x * std::cos(theta) + v * std::sin(theta);
  const Eigen::VectorXd slack = (normals_ * next).array() + (offsets_.array() + shift_);
  if (slack.size() > 0 && slack.minCoeff() < -kEndpointSlack) {
    if (diag) ++diag->degenerate_steps;
    return;
  }
  x = std::move(next);
}

AngleIntervalSet active_intervals(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const HalfSpaceSet& set) {
  return LinearEllipticalSlice(set).active_intervals(x, v);
}

Eigen::VectorXd ess_step(const Eigen::VectorXd& x, const HalfSpaceSet& set, Rng& rng, EssDiagnostics* diag) {
  Eigen::VectorXd out = x;
  LinearEllipticalSlice(set).step(out, rng, diag);
  return out;
}

}  // namespace bayes_bound
