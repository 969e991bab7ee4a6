/* Copyright 2026 The QPS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// qps: sweeps of postselection errors and the randomized verification suite.
//
// Exit codes: 0 success, 1 usage error, 2 numerical tolerance failure,
// 3 configuration file error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "json.hpp"
#include "qps/qps.hpp"

namespace {

using json = nlohmann::json;

constexpr int kUsage = 1;
constexpr int kTolerance = 2;
constexpr int kConfig = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
std::function<void(qps::RunConfig&, const json&)> field(T qps::RunConfig::*m) {
  return [m](qps::RunConfig& c, const json& v) { c.*m = v.get<T>(); };
}

std::function<void(qps::RunConfig&, const json&)> optional_field(
    std::optional<double> qps::RunConfig::*m) {
  return [m](qps::RunConfig& c, const json& v) {
    if (!v.is_number()) throw ConfigError("expected a number");
    c.*m = v.get<double>();
  };
}

// JSON keys are the long flag names.
const std::map<std::string, std::function<void(qps::RunConfig&, const json&)>>&
config_keys() {
  static const std::map<std::string,
                        std::function<void(qps::RunConfig&, const json&)>>
      keys = {
          {"q", field(&qps::RunConfig::q)},
          {"sigma", field(&qps::RunConfig::sigma)},
          {"n-max", field(&qps::RunConfig::n_max)},
          {"fit-max", field(&qps::RunConfig::fit_max)},
          {"slope-tol", field(&qps::RunConfig::slope_tol)},
          {"q1", field(&qps::RunConfig::q1)},
          {"dim", field(&qps::RunConfig::dim)},
          {"rank", field(&qps::RunConfig::rank)},
          {"seed", field(&qps::RunConfig::seed)},
          {"lambda", optional_field(&qps::RunConfig::lambda)},
          {"x-min", field(&qps::RunConfig::x_min)},
          {"x-max", field(&qps::RunConfig::x_max)},
          {"points", field(&qps::RunConfig::points)},
          {"log", field(&qps::RunConfig::log_spacing)},
          {"x", optional_field(&qps::RunConfig::x)},
          {"x-star", optional_field(&qps::RunConfig::x_star)},
          {"h", field(&qps::RunConfig::h)},
          {"richardson", field(&qps::RunConfig::richardson)},
          {"ratio-tol", field(&qps::RunConfig::ratio_tol)},
          {"eps0-tol", field(&qps::RunConfig::eps0_tol)},
          {"trials", field(&qps::RunConfig::trials)},
          {"output", field(&qps::RunConfig::output)},
          {"svg", field(&qps::RunConfig::svg)},
      };
  return keys;
}

void load_config(const std::string& path, qps::RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    auto it = config_keys().find(key);
    if (it == config_keys().end()) throw ConfigError("unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const json::exception&) {
      throw ConfigError("bad value for '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
}

// The config file is read before flag parsing so that flags win.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string_view arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.substr(0, 9) == "--config=") return std::string(arg.substr(9));
  }
  return {};
}

std::uint64_t default_seed() {
  const char* env = std::getenv("QPS_SEED");
  if (env == nullptr || *env == '\0') return 7;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    return 7;
  }
}

void add_sweep_flags(CLI::App* sub, qps::RunConfig& cfg) {
  sub->add_option_function<double>(
      "--lambda", [&cfg](double v) { cfg.lambda = v; },
      "support weight in the kept effect, in (0, 1)");
  sub->add_option("--x-min", cfg.x_min, "smallest x of the sweep");
  sub->add_option("--x-max", cfg.x_max, "largest x of the sweep");
  sub->add_option("--points", cfg.points, "number of sweep points");
  sub->add_flag("--log", cfg.log_spacing, "logarithmic x spacing");
  sub->add_option_function<double>(
      "--x", [&cfg](double v) { cfg.x = v; }, "single x instead of a sweep");
  sub->add_option_function<double>(
      "--x-star", [&cfg](double v) { cfg.x_star = v; },
      "fixed prior point of the POVM");
  sub->add_option("--h", cfg.h, "relative finite-difference step");
  sub->add_flag("--richardson", cfg.richardson,
                "Richardson-extrapolated differences");
  sub->add_option("--ratio-tol", cfg.ratio_tol, "tolerance on |ratio - 1|");
  sub->add_option("--eps0-tol", cfg.eps0_tol,
                  "tolerance on eps0 when x_star tracks x");
  sub->add_option("--output,-o", cfg.output, "CSV path (default: stdout)");
  sub->add_option("--svg", cfg.svg, "log-log plot of eps0 and eps1");
}

int report_sweep(const qps::RunConfig& cfg) {
  qps::SweepResult result = qps::run_sweep(cfg);
  std::ostream* summary = &std::cout;
  if (cfg.output.empty()) {
    qps::write_csv(std::cout, result.rows);
    summary = &std::cerr;
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << cfg.output << "\n";
      return kUsage;
    }
    qps::write_csv(out, result.rows);
  }
  if (!cfg.svg.empty()) {
    std::ofstream svg(cfg.svg, std::ios::binary);
    svg << qps::render_svg(result.rows);
  }
  for (const auto& line : result.summary) *summary << line << "\n";
  for (const auto& v : result.verdicts) {
    *summary << (v.pass ? "PASS " : "FAIL ") << v.name;
    if (!v.detail.empty()) *summary << ": " << v.detail;
    *summary << "\n";
  }
  return result.passed() ? 0 : kTolerance;
}

json to_json(const qps::Counterexample& c) {
  json values = json::object();
  for (const auto& [k, v] : c.values) values[k] = v;
  return {{"suite", c.suite},
          {"seed", c.seed},
          {"trial", c.trial},
          {"message", c.message},
          {"values", values}};
}

int report_verify(const qps::RunConfig& cfg, bool inject) {
  if (cfg.trials == 0) {
    std::cerr << "InvalidConfig: trials must be at least 1\n";
    return kUsage;
  }
  qps::VerifyOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.inject_broken_povm = inject;
  qps::VerifyReport report = qps::verify_suite(opts);
  for (const auto& s : report.suites) {
    std::cout << (s.ok() ? "PASS " : "FAIL ") << s.name << ": " << s.passed
              << "/" << s.trials << "\n";
    if (s.first_failure) {
      std::cout << "counterexample: " << to_json(*s.first_failure).dump()
                << "\n";
    }
  }
  return report.all_passed() ? 0 : kTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  qps::RunConfig cfg;
  cfg.seed = default_seed();
  std::string config_path = find_config_path(argc, argv);
  try {
    if (!config_path.empty()) load_config(config_path, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kConfig;
  }

  CLI::App app{"Lossless postselection for quasi-pure states"};
  app.require_subcommand(1);
  // "-h" would collide with the finite-difference step "--h".
  app.set_help_flag("--help", "print this help message and exit");
  bool inject = false;

  auto* superres = app.add_subcommand("superres", "two point sources in the Hermite-Gaussian basis");
  auto* two_qubit = app.add_subcommand("two-qubit", "exp(-i x XX) acting on a mixed two-qubit state");
  auto* ancilla = app.add_subcommand("ancilla", "random instance of the ancilla protocol");
  auto* verify = app.add_subcommand("verify", "randomized property suites");
  for (auto* sub : {superres, two_qubit, ancilla, verify}) {
    sub->add_option("--config", config_path, "JSON file whose keys mirror the flags");
  }

  superres->add_option("--q", cfg.q, "intensity of the source at +x/2");
  superres->add_option("--sigma", cfg.sigma, "point-spread width");
  superres->add_option("--n-max", cfg.n_max, "Hermite-Gaussian modes kept");
  superres->add_option("--fit-max", cfg.fit_max, "largest x in the slope fit");
  superres->add_option("--slope-tol", cfg.slope_tol, "relative tolerance on fitted slopes");
  add_sweep_flags(superres, cfg);

  two_qubit->add_option("--q1", cfg.q1, "weight of |00> in the initial state");
  add_sweep_flags(two_qubit, cfg);

  ancilla->add_option("--dim", cfg.dim, "system dimension");
  ancilla->add_option("--rank", cfg.rank, "rank of the initial state and ancilla dimension");
  ancilla->add_option("--seed", cfg.seed, "seed of the random instance");
  add_sweep_flags(ancilla, cfg);

  verify->add_option("--trials", cfg.trials, "trials per suite");
  verify->add_option("--seed", cfg.seed, "base seed");
  verify->add_flag("--inject-broken-povm", inject,
                   "negative control: break completeness of one POVM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (verify->parsed()) return report_verify(cfg, inject);
    cfg.command = superres->parsed()    ? qps::Command::Superres
                  : two_qubit->parsed() ? qps::Command::TwoQubit
                                        : qps::Command::Ancilla;
    return report_sweep(cfg);
  } catch (const qps::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case qps::Errc::LambdaOutOfRange:
      case qps::Errc::InvalidConfig:
      case qps::Errc::NonPositiveInput:
      case qps::Errc::DimensionTooSmall:
        return kUsage;
      default:
        return kTolerance;
    }
  }
}
