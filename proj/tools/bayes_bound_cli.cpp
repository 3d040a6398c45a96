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

// Command-line front end. Talks to the library only through the C API.

#include "bayes_bound/bayes_bound.h"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ModelDeleter {
  void operator()(bb_model* m) const { bb_model_free(m); }
};
struct FlowDeleter {
  void operator()(bb_flow* f) const { bb_flow_free(f); }
};
struct CurveDeleter {
  void operator()(bb_curve* c) const { bb_curve_free(c); }
};
struct CheckDeleter {
  void operator()(bb_check* c) const { bb_check_free(c); }
};
using ModelPtr = std::unique_ptr<bb_model, ModelDeleter>;
using FlowPtr = std::unique_ptr<bb_flow, FlowDeleter>;
using CurvePtr = std::unique_ptr<bb_curve, CurveDeleter>;
using CheckPtr = std::unique_ptr<bb_check, CheckDeleter>;

// Thrown to unwind to main with an exit code after printing a message.
struct Exit {
  int code;
};

int exit_code_for(bb_status status) {
  switch (status) {
    case BB_OK:
      return kExitOk;
    case BB_ERR_NUMERICAL:
    case BB_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

void check(bb_status status, const char* context) {
  if (status == BB_OK) return;
  std::cerr << "error: " << context << ": " << bb_last_error() << "\n";
  throw Exit{exit_code_for(status)};
}

// Shortest round-trip representation, with ".0" on integral values.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

unsigned default_threads() {
  if (const char* env = std::getenv("BAYES_BOUND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct CommonOptions {
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  bb_hdr_config hdr{};

  CommonOptions() { bb_hdr_config_default(&hdr); }

  void add_to(CLI::App* cmd, bool with_hdr = true) {
    cmd->add_option("--seed", seed, "Master random seed")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads (default: $BAYES_BOUND_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    if (!with_hdr) return;
    cmd->add_option("--n-per-level", hdr.n_per_level, "HDR samples per nesting level")->capture_default_str();
    cmd->add_option("--rho", hdr.rho, "HDR conditional probability per level")->capture_default_str();
    cmd->add_option("--repeats", hdr.repeats, "Independent HDR runs")->capture_default_str();
    cmd->add_option("--max-levels", hdr.max_levels, "Cap on nesting levels")->capture_default_str();
    cmd->add_option("--thin", hdr.thin, "Sampler steps per retained draw (0 = dimension)");
    cmd->add_option("--burn-in", hdr.burn_in, "Sampler steps after re-seeding (0 = 4 x dimension)");
  }

  bb_hdr_config config() const {
    bb_hdr_config c = hdr;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
};

ModelPtr load(const std::string& path) {
  bb_model* m = nullptr;
  check(bb_model_load(path.c_str(), &m), "loading model");
  return ModelPtr(m);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::cerr << "error: cannot parse number '" << item << "'\n";
      throw Exit{kExitInput};
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void print_result(const bb_bayes_result& r) {
  std::cout << "bayes_error " << num(r.error) << "\n";
  std::cout << "stderr " << num(r.std_error) << "\n";
  std::cout << "log_error " << num(r.log_error) << "\n";
  if (r.has_closed_form) std::cout << "closed_form " << num(r.closed_form) << "\n";
}

// ---- subcommands --------------------------------------------------------

struct ComputeCmd {
  std::string model;
  double tau = 1.0;
  std::string method = "hdr";
  std::uint64_t samples = 1000000;

  int run(const CommonOptions& common) const {
    ModelPtr m = load(model);
    const uint32_t k = bb_model_num_classes(m.get());
    bb_bayes_result r{};
    if (method == "mc") {
      check(bb_monte_carlo_bayes_error(m.get(), tau, samples, common.seed, common.threads, &r), "monte carlo");
      std::cout << "method monte_carlo\n";
      print_result(r);
      return kExitOk;
    }
    if (method == "closed-form") {
      double e = 0.0, le = 0.0;
      check(bb_binary_closed_form(m.get(), tau, &e, &le), "closed form");
      std::cout << "method closed_form\nbayes_error " << num(e) << "\nlog_error " << num(le) << "\n";
      return kExitOk;
    }
    std::vector<bb_class_term> terms(k);
    const bb_hdr_config cfg = common.config();
    check(bb_compute_bayes_error(m.get(), tau, &cfg, &r, terms.data()), "HDR integration");
    std::cout << "method hdr\n";
    std::cout << "tau " << num(tau) << "\n";
    print_result(r);
    for (uint32_t j = 0; j < k; ++j) {
      const auto& t = terms[j];
      std::cout << "class " << j << " p " << num(t.p) << " stderr " << num(t.std_error) << " levels " << t.levels
                << " constraints " << t.num_constraints << " reduced_dim " << t.reduced_dim
                << (t.via_complement ? " complement" : "") << "\n";
    }
    std::cout << "levels_total " << r.levels_total << "\n";
    return kExitOk;
  }
};

struct SweepCmd {
  std::string model;
  double tau_min = 0.25;
  double tau_max = 4.0;
  unsigned steps = 10;
  bool linear = false;
  std::string out;

  int run(const CommonOptions& common) const {
    ModelPtr m = load(model);
    if (!(tau_min > 0.0 && tau_max > tau_min) || steps < 2) {
      std::cerr << "error: need 0 < --tau-min < --tau-max and --steps >= 2\n";
      return kExitInput;
    }
    std::vector<double> grid(steps);
    check(bb_tau_grid(tau_min, tau_max, steps, linear ? 0 : 1, grid.data()), "building grid");
    const bb_hdr_config cfg = common.config();
    bb_curve* raw = nullptr;
    check(bb_temperature_sweep(m.get(), grid.data(), grid.size(), &cfg, &raw), "temperature sweep");
    CurvePtr curve(raw);
    for (std::size_t i = 0; i < bb_curve_num_warnings(curve.get()); ++i)
      std::cerr << "warning: " << bb_curve_warning(curve.get(), i) << "\n";
    check(bb_curve_write_csv(curve.get(), "-"), "writing CSV");
    if (!out.empty() && out != "-") check(bb_curve_write_csv(curve.get(), out.c_str()), "writing CSV");
    return kExitOk;
  }
};

struct InvertCmd {
  std::string model;
  double target = 0.1;
  double tau_lo = 0.1;
  double tau_hi = 10.0;
  double tol = 1e-3;
  double tol_error = 0.0;

  int run(const CommonOptions& common) const {
    ModelPtr m = load(model);
    const bb_hdr_config cfg = common.config();
    bb_inversion inv{};
    check(bb_invert_temperature(m.get(), target, tau_lo, tau_hi, tol, tol_error, &cfg, &inv), "inversion");
    if (inv.warned_floor) std::cerr << "warning: target is below the standard-error floor of the HDR budget\n";
    std::cout << "tau " << num(inv.tau) << "\n";
    print_result(inv.estimate);
    std::cout << "evaluations " << inv.evaluations << "\nrepeats " << inv.repeats_used << "\n";
    return kExitOk;
  }
};

struct OneVsAllCmd {
  std::string model;
  unsigned class_index = 0;
  std::uint64_t samples = 1000000;
  std::string weight_mode = "balanced";
  double tau = 1.0;

  int run(const CommonOptions& common) const {
    ModelPtr m = load(model);
    double err = 0.0, se = 0.0;
    const int mode = weight_mode == "natural" ? BB_WEIGHTS_NATURAL : BB_WEIGHTS_BALANCED;
    check(bb_one_vs_all_error(m.get(), class_index, tau, samples, common.seed, mode, common.threads, &err, &se),
          "one-vs-all");
    std::cout << "class " << class_index << "\none_vs_all_error " << num(err) << "\nstderr " << num(se) << "\n";
    return kExitOk;
  }
};

struct ValidateClosedFormCmd {
  unsigned dim = 784;
  std::string taus = "0.5,1,2,4";
  std::string out;

  int run(const CommonOptions& common) const {
    const std::vector<double> grid = parse_list(taus);
    const bb_hdr_config cfg = common.config();
    bb_check* raw = nullptr;
    check(bb_validate_binary_closed_form(dim, grid.data(), grid.size(), &cfg, common.seed, &raw), "validation");
    CheckPtr result(raw);
    check(bb_check_write_csv(result.get(), "-"), "writing CSV");
    if (!out.empty() && out != "-") check(bb_check_write_csv(result.get(), out.c_str()), "writing CSV");
    for (std::size_t i = 0; i < bb_check_size(result.get()); ++i) {
      bb_check_row row{};
      check(bb_check_row_at(result.get(), i, &row), "reading row");
      if (row.log_space) std::cerr << "note: tau=" << num(row.tau) << " compared in log space\n";
    }
    const bool pass = bb_check_passed(result.get());
    std::cerr << (pass ? "PASS" : "FAIL") << ": every rel_err <= 0.05\n";
    return pass ? kExitOk : kExitCheckFailed;
  }
};

struct FlowInvarianceCmd {
  std::string model;
  std::string flow;
  std::uint64_t random_flow_seed = 0;
  unsigned layers = 6;
  double tau = 1.0;
  std::uint64_t samples = 1000000;
  std::uint64_t check_points = 10000;

  int run(const CommonOptions& common, bool random_flow) const {
    ModelPtr m = load(model);
    bb_flow* raw = nullptr;
    if (!flow.empty()) {
      check(bb_flow_load(flow.c_str(), &raw), "loading flow");
    } else if (random_flow) {
      check(bb_flow_random(bb_model_dim(m.get()), layers, random_flow_seed, 1, &raw), "building flow");
    } else {
      std::cerr << "error: give --flow PATH or --random-flow SEED\n";
      return kExitInput;
    }
    FlowPtr f(raw);
    const bb_hdr_config cfg = common.config();
    bb_invariance_report rep{};
    check(bb_invariance_harness(f.get(), m.get(), tau, samples, &cfg, &rep), "invariance harness");
    uint64_t mismatches = 0;
    check(bb_classifier_mismatches(f.get(), m.get(), tau, check_points, common.seed, &mismatches),
          "classifier equivalence");
    std::cout << "x_space_mc " << num(rep.x_space_mc) << " stderr " << num(rep.x_space_std_error) << "\n";
    std::cout << "base_hdr " << num(rep.base_hdr) << " stderr " << num(rep.base_std_error) << "\n";
    std::cout << "combined_stderr " << num(rep.combined_std_error) << "\n";
    std::cout << "classifier_mismatches " << mismatches << " of " << check_points << "\n";
    const bool pass = rep.pass && mismatches == 0;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitCheckFailed;
  }
};

struct GenSyntheticCmd {
  unsigned classes = 2;
  unsigned dim = 784;
  std::string scheme = "unit-sphere";
  std::string out;
  std::string format = "binary";

  int run(const CommonOptions& common) const {
    bb_model* raw = nullptr;
    const int s = scheme == "simplex" ? BB_MEANS_SIMPLEX : BB_MEANS_UNIT_SPHERE;
    check(bb_model_generate(classes, dim, s, common.seed, &raw), "generating model");
    ModelPtr m(raw);
    check(bb_model_save(m.get(), out.c_str(), format == "json" ? BB_FORMAT_JSON : BB_FORMAT_BINARY), "saving model");
    std::cout << "wrote " << out << " (K=" << classes << ", d=" << dim << ")\n";
    return kExitOk;
  }
};

struct GenFlowCmd {
  unsigned dim = 2;
  unsigned layers = 6;
  bool additive = false;
  std::string out;

  int run(const CommonOptions& common) const {
    bb_flow* raw = nullptr;
    check(bb_flow_random(dim, layers, common.seed, additive ? 0 : 1, &raw), "building flow");
    FlowPtr f(raw);
    check(bb_flow_save(f.get(), out.c_str()), "saving flow");
    std::cout << "wrote " << out << " (d=" << dim << ", layers=" << layers << ")\n";
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Bayes error of Gaussian class-conditional models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bb_version());

  CommonOptions common;

  ComputeCmd compute;
  auto* c_compute = app.add_subcommand("compute", "Bayes error of a model at one temperature");
  c_compute->add_option("model", compute.model, "GCM model file")->required();
  c_compute->add_option("--tau", compute.tau, "Temperature")->capture_default_str()->check(CLI::PositiveNumber);
  c_compute->add_option("--method", compute.method, "hdr | mc | closed-form")
      ->capture_default_str()
      ->check(CLI::IsMember({"hdr", "mc", "closed-form"}));
  c_compute->add_option("--samples", compute.samples, "Monte Carlo sample count (--method mc)");
  common.add_to(c_compute);

  SweepCmd sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Bayes error over a temperature grid (CSV)");
  c_sweep->add_option("model", sweep.model, "GCM model file")->required();
  c_sweep->add_option("--tau-min", sweep.tau_min)->capture_default_str();
  c_sweep->add_option("--tau-max", sweep.tau_max)->capture_default_str();
  c_sweep->add_option("--steps", sweep.steps)->capture_default_str();
  c_sweep->add_flag("--linear", sweep.linear, "Linear instead of geometric grid");
  c_sweep->add_option("--out", sweep.out, "CSV output path (always echoed to stdout)");
  common.add_to(c_sweep);

  InvertCmd invert;
  auto* c_invert = app.add_subcommand("invert", "Temperature achieving a target Bayes error");
  c_invert->add_option("model", invert.model, "GCM model file")->required();
  c_invert->add_option("--target", invert.target, "Target Bayes error")->required();
  c_invert->add_option("--tau-lo", invert.tau_lo)->capture_default_str();
  c_invert->add_option("--tau-hi", invert.tau_hi)->capture_default_str();
  c_invert->add_option("--tol", invert.tol, "Relative bracket tolerance on tau")->capture_default_str();
  c_invert->add_option("--tol-error", invert.tol_error, "Absolute tolerance on the error")->capture_default_str();
  common.add_to(c_invert);

  OneVsAllCmd ova;
  auto* c_ova = app.add_subcommand("one-vs-all", "Monte Carlo one-vs-all Bayes error of one class");
  c_ova->add_option("model", ova.model, "GCM model file")->required();
  c_ova->add_option("--class", ova.class_index, "Class index")->required();
  c_ova->add_option("--samples", ova.samples)->capture_default_str();
  c_ova->add_option("--weight-mode", ova.weight_mode, "balanced | natural")
      ->capture_default_str()
      ->check(CLI::IsMember({"balanced", "natural"}));
  c_ova->add_option("--tau", ova.tau)->capture_default_str()->check(CLI::PositiveNumber);
  common.add_to(c_ova, false);

  ValidateClosedFormCmd validate;
  auto* c_validate = app.add_subcommand("validate-fig1", "HDR vs closed form on random unit-vector binary problems");
  c_validate->add_option("--dim", validate.dim)->capture_default_str()->check(CLI::Range(2u, 1u << 20));
  c_validate->add_option("--taus", validate.taus, "Comma-separated temperatures")->capture_default_str();
  c_validate->add_option("--out", validate.out, "CSV output path (always echoed to stdout)");
  common.add_to(c_validate);

  FlowInvarianceCmd inv;
  auto* c_inv = app.add_subcommand("flow-invariance", "Bayes error in flow space vs base space");
  c_inv->add_option("model", inv.model, "GCM model file")->required();
  auto* flow_opt = c_inv->add_option("--flow", inv.flow, "Flow JSON file");
  auto* random_opt = c_inv->add_option("--random-flow", inv.random_flow_seed, "Seed for a random coupling flow");
  flow_opt->excludes(random_opt);
  c_inv->add_option("--layers", inv.layers, "Layers of the random flow")->capture_default_str();
  c_inv->add_option("--tau", inv.tau)->capture_default_str()->check(CLI::PositiveNumber);
  c_inv->add_option("--samples", inv.samples)->capture_default_str();
  c_inv->add_option("--check-points", inv.check_points, "Points for the classifier-equivalence check")
      ->capture_default_str();
  common.add_to(c_inv);

  GenSyntheticCmd gen;
  auto* c_gen = app.add_subcommand("gen-synthetic", "Write a synthetic GCM model");
  c_gen->add_option("--classes", gen.classes)->capture_default_str();
  c_gen->add_option("--dim", gen.dim)->capture_default_str();
  c_gen->add_option("--mean-scheme", gen.scheme)
      ->capture_default_str()
      ->check(CLI::IsMember({"unit-sphere", "simplex"}));
  c_gen->add_option("--format", gen.format)->capture_default_str()->check(CLI::IsMember({"binary", "json"}));
  c_gen->add_option("--out", gen.out)->required();
  common.add_to(c_gen, false);

  GenFlowCmd gflow;
  auto* c_gflow = app.add_subcommand("gen-flow", "Write a random coupling flow as JSON");
  c_gflow->add_option("--dim", gflow.dim)->capture_default_str();
  c_gflow->add_option("--layers", gflow.layers)->capture_default_str();
  c_gflow->add_flag("--additive", gflow.additive, "Volume-preserving layers only");
  c_gflow->add_option("--out", gflow.out)->required();
  common.add_to(c_gflow, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_compute->parsed()) return compute.run(common);
    if (c_sweep->parsed()) return sweep.run(common);
    if (c_invert->parsed()) return invert.run(common);
    if (c_ova->parsed()) return ova.run(common);
    if (c_validate->parsed()) return validate.run(common);
    if (c_inv->parsed()) return inv.run(common, random_opt->count() > 0);
    if (c_gen->parsed()) return gen.run(common);
    if (c_gflow->parsed()) return gflow.run(common);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitInput;
}
