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
#ifndef QPS_SWEEP_HPP_
#define QPS_SWEEP_HPP_

// Parameter sweeps of the postselection errors for the three applications,
// CSV emission and small-x fits.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qps/apps.hpp"
#include "qps/postselect.hpp"
#include "qps/random.hpp"

namespace qps {

enum class Command { Superres, TwoQubit, Ancilla, Verify };

struct RunConfig {
  Command command = Command::Superres;
  // application parameters
  double q = 0.3;
  double sigma = 1.0;
  std::optional<double> lambda;  // per-command default when unset
  double q1 = 0.3;
  Eigen::Index dim = 4;          // ancilla: system dimension
  Eigen::Index rank = 3;         // ancilla: rank of the initial state
  std::uint64_t seed = 7;
  // sweep
  double x_min = 1e-4;
  double x_max = 1e-1;
  std::size_t points = 40;
  bool log_spacing = false;
  std::optional<double> x;       // single point instead of a sweep
  std::optional<double> x_star;  // fixed prior point; unset = default frame
  // numerics
  double h = 1e-5;  // relative finite-difference step
  bool richardson = false;
  Eigen::Index n_max = 30;
  double fit_max = 1e-2;
  double slope_tol = 0.02;
  double ratio_tol = 1e-5;
  double eps0_tol = 1e-7;
  // verify
  std::size_t trials = 100;
  // output
  std::string output;  // CSV path; empty = stdout
  std::string svg;
};

inline double default_lambda(Command c) {
  switch (c) {
    case Command::Superres: return 1e-2;
    case Command::TwoQubit: return 1e-4;
    default: return 1e-3;
  }
}

inline double lambda_of(const RunConfig& cfg) {
  return cfg.lambda.value_or(default_lambda(cfg.command));
}

/// Throws on an invalid sweep configuration (LambdaOutOfRange or
/// InvalidConfig).
inline void validate(const RunConfig& cfg) {
  detail::require_lambda(lambda_of(cfg));
  if (!cfg.x) {
    if (!(cfg.x_min > 0.0)) throw Error(Errc::InvalidConfig, "x_min must be > 0");
    if (!(cfg.x_max > cfg.x_min)) {
      throw Error(Errc::InvalidConfig, "x_max must exceed x_min");
    }
    if (cfg.points < 2) throw Error(Errc::InvalidConfig, "points must be >= 2");
  }
  if (!(cfg.h > 0.0)) throw Error(Errc::InvalidConfig, "h must be > 0");
}

inline std::vector<double> sweep_grid(const RunConfig& cfg) {
  if (cfg.x) return {*cfg.x};
  std::vector<double> grid(cfg.points);
  for (std::size_t i = 0; i < cfg.points; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(cfg.points - 1);
    grid[i] = cfg.log_spacing
                  ? cfg.x_min * std::pow(cfg.x_max / cfg.x_min, t)
                  : cfg.x_min + t * (cfg.x_max - cfg.x_min);
  }
  return grid;
}

struct SweepRow {
  double x = 0.0;
  double p_success = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;
  std::optional<double> eps0_theory;
  std::optional<double> eps1_theory;
  double qfi_rho = 0.0;
  double qfi_post = 0.0;
  double ratio = 0.0;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> summary;
  std::vector<Verdict> verdicts;

  bool passed() const {
    for (const auto& v : verdicts) {
      if (!v.pass) return false;
    }
    return true;
  }
};

/// Least-squares fit y = s x + c x^2, returns (s, c).
inline std::pair<double, double> fit_linear_quadratic(
    const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd a(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = x[i];
    a(i, 1) = x[i] * x[i];
    b(i) = y[i];
  }
  Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  return {c(0), c(1)};
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* csv_header() {
  return "x,p_success,eps0,eps1,eps0_theory,eps1_theory,qfi_rho,qfi_post,ratio";
}

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << csv_header() << '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  for (const auto& r : rows) {
    out << format_number(r.x) << ',' << format_number(r.p_success) << ','
        << format_number(r.eps0) << ',' << format_number(r.eps1) << ','
        << opt(r.eps0_theory) << ',' << opt(r.eps1_theory) << ','
        << format_number(r.qfi_rho) << ',' << format_number(r.qfi_post) << ','
        << format_number(r.ratio) << '\n';
  }
}

namespace detail {

inline SweepRow row_from(double x, const PostselectionReport& r) {
  SweepRow row;
  row.x = x;
  row.p_success = r.p_success;
  row.eps0 = r.eps0;
  row.eps1 = r.eps1;
  row.qfi_rho = r.qfi_rho;
  row.qfi_post = r.qfi_post;
  row.ratio = r.amplification_ratio;
  return row;
}

inline bool non_decreasing(const std::vector<SweepRow>& rows,
                           double SweepRow::*field) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].*field < rows[i - 1].*field) return false;
  }
  return true;
}

inline FiniteDifference fd_of(const RunConfig& cfg) {
  FiniteDifference fd;
  fd.relative_step = cfg.h;
  fd.richardson = cfg.richardson;
  return fd;
}

/// Rows for a state whose frame either tracks x or stays at x_star.
inline std::vector<SweepRow> tracked_rows(const ParametricState& s,
                                          const RunConfig& cfg,
                                          NormKind norm) {
  const double lambda = lambda_of(cfg);
  std::optional<PostselectionFrame> fixed;
  if (cfg.x_star) fixed = tangent_frame(s, *cfg.x_star);
  std::vector<SweepRow> rows;
  for (double x : sweep_grid(cfg)) {
    PostselectionFrame frame = fixed ? *fixed : tangent_frame(s, x);
    rows.push_back(row_from(x, postselection_report(s, x, frame, lambda, norm)));
  }
  return rows;
}

inline void tracking_verdicts(const RunConfig& cfg, SweepResult& out) {
  if (cfg.x_star) return;
  double worst_ratio = 0.0;
  double worst_eps0 = 0.0;
  for (const auto& r : out.rows) {
    worst_ratio = std::max(worst_ratio, std::abs(r.ratio - 1.0));
    worst_eps0 = std::max(worst_eps0, r.eps0);
  }
  out.verdicts.push_back({"amplification ratio", worst_ratio <= cfg.ratio_tol,
                          "max |ratio - 1| = " + format_number(worst_ratio)});
  out.verdicts.push_back({"eps0 at x_star = x", worst_eps0 < cfg.eps0_tol,
                          "max eps0 = " + format_number(worst_eps0)});
}

}  // namespace detail

inline SweepResult sweep_superres(const RunConfig& cfg) {
  SuperresConfig sc{cfg.q, cfg.sigma, cfg.n_max};
  ParametricState s = superres_state(sc).with_step(detail::fd_of(cfg));
  const double lambda = lambda_of(cfg);
  PostselectionFrame frame = cfg.x_star ? tangent_frame(s, *cfg.x_star)
                                        : superres_rayleigh_frame(sc);
  SweepResult out;
  for (double x : sweep_grid(cfg)) {
    SweepRow row = detail::row_from(
        x, postselection_report(s, x, frame, lambda, NormKind::Frobenius));
    SuperresTheory t = superres_theory(x, cfg.q, lambda, cfg.sigma);
    row.eps0_theory = t.eps0;
    row.eps1_theory = t.eps1;
    out.rows.push_back(row);
  }

  std::vector<double> xs, e0, e1;
  for (const auto& r : out.rows) {
    if (r.x <= cfg.fit_max) {
      xs.push_back(r.x);
      e0.push_back(r.eps0);
      e1.push_back(r.eps1);
    }
  }
  SuperresTheory slope = superres_theory(1.0, cfg.q, lambda, cfg.sigma);
  out.summary.push_back("theory slopes: eps0 " + format_number(slope.eps0) +
                        ", eps1 " + format_number(slope.eps1));
  if (xs.size() >= 2 && !cfg.x_star) {
    auto [s0, c0] = fit_linear_quadratic(xs, e0);
    auto [s1, c1] = fit_linear_quadratic(xs, e1);
    out.summary.push_back("fitted slopes over x <= " + format_number(cfg.fit_max) +
                          ": eps0 " + format_number(s0) + ", eps1 " +
                          format_number(s1));
    auto close = [&](double got, double want) {
      return std::abs(got - want) <= cfg.slope_tol * std::abs(want) + 1e-9;
    };
    out.verdicts.push_back({"eps0 slope", close(s0, slope.eps0),
                            format_number(s0) + " vs " + format_number(slope.eps0)});
    out.verdicts.push_back({"eps1 slope", close(s1, slope.eps1),
                            format_number(s1) + " vs " + format_number(slope.eps1)});
  } else {
    out.summary.push_back("fewer than two points below fit_max; no slope fit");
  }
  if (out.rows.size() >= 2 && !cfg.x_star) {
    bool mono = detail::non_decreasing(out.rows, &SweepRow::eps0) &&
                detail::non_decreasing(out.rows, &SweepRow::eps1);
    out.verdicts.push_back({"eps curves monotone in x", mono, ""});
  }
  double x_check = out.rows.back().x;
  double defect = superres_truncation_defect(sc, x_check);
  out.verdicts.push_back({"truncation", defect < 1e-8,
                          "|QFI(n_max) - QFI(2 n_max)| at x = " +
                              format_number(x_check) + ": " +
                              format_number(defect)});
  return out;
}

inline SweepResult sweep_two_qubit(const RunConfig& cfg) {
  ParametricState s = two_qubit_state(cfg.q1).with_step(detail::fd_of(cfg));
  SweepResult out;
  out.rows = detail::tracked_rows(s, cfg, NormKind::Spectral);
  double worst = 0.0;
  for (const auto& r : out.rows) worst = std::max(worst, std::abs(r.qfi_rho - 4.0));
  out.summary.push_back("max |qfi_rho - 4| = " + format_number(worst));
  out.verdicts.push_back({"qfi_rho = 4", worst <= 1e-8, format_number(worst)});
  detail::tracking_verdicts(cfg, out);
  return out;
}

inline SweepResult sweep_ancilla(const RunConfig& cfg) {
  if (cfg.rank < 1 || cfg.rank > cfg.dim) {
    throw Error(Errc::InvalidConfig, "rank must lie in [1, dim]");
  }
  Rng rng(cfg.seed);
  ParametricState s = random_ancilla_family(cfg.dim, cfg.rank, rng)
                          .with_step(detail::fd_of(cfg));
  SweepResult out;
  out.rows = detail::tracked_rows(s, cfg, NormKind::Frobenius);
  out.summary.push_back("ancilla instance: dim " + std::to_string(cfg.dim) +
                        ", rank " + std::to_string(cfg.rank) + ", seed " +
                        std::to_string(cfg.seed));
  detail::tracking_verdicts(cfg, out);
  return out;
}

inline SweepResult run_sweep(const RunConfig& cfg) {
  validate(cfg);
  switch (cfg.command) {
    case Command::Superres: return sweep_superres(cfg);
    case Command::TwoQubit: return sweep_two_qubit(cfg);
    case Command::Ancilla: return sweep_ancilla(cfg);
    default: throw Error(Errc::InvalidConfig, "not a sweep command");
  }
}

/// Log-log plot of the eps columns as a standalone SVG document.
inline std::string render_svg(const std::vector<SweepRow>& rows) {
  const double w = 640, hgt = 420, pad = 50;
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (const auto& r : rows) {
    for (double y : {r.eps0, r.eps1}) {
      if (r.x <= 0.0 || y <= 0.0) continue;
      lx0 = std::min(lx0, std::log10(r.x));
      lx1 = std::max(lx1, std::log10(r.x));
      ly0 = std::min(ly0, std::log10(y));
      ly1 = std::max(ly1, std::log10(y));
    }
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (lx1 > lx0 && ly1 > ly0) {
    auto px = [&](double v) { return pad + (std::log10(v) - lx0) / (lx1 - lx0) * (w - 2 * pad); };
    auto py = [&](double v) { return hgt - pad - (std::log10(v) - ly0) / (ly1 - ly0) * (hgt - 2 * pad); };
    const std::pair<double SweepRow::*, const char*> series[] = {
        {&SweepRow::eps0, "steelblue"}, {&SweepRow::eps1, "firebrick"}};
    for (const auto& [field, color] : series) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (const auto& r : rows) {
        if (r.x > 0.0 && r.*field > 0.0) svg << px(r.x) << ',' << py(r.*field) << ' ';
      }
      svg << "\"/>\n";
    }
    svg << "<text x=\"" << pad << "\" y=\"20\">eps0 (blue), eps1 (red) vs x, log-log</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qps

#endif  // QPS_SWEEP_HPP_
