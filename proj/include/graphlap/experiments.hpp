#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "averaging.hpp"
#include "estimator.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "record.hpp"
#include "stats.hpp"

namespace graphlap {

/// h(n) = c n^{-gamma}.
class BandwidthSchedule {
public:
  BandwidthSchedule(double c, double gamma) : c_(c), gamma_(gamma) {
    if (!(c > 0.0) || !std::isfinite(c) || !(gamma > 0.0) ||
        !std::isfinite(gamma))
      throw Error(ErrorKind::InvalidArgument,
                  "schedule needs c > 0 and gamma > 0");
  }

  double c() const noexcept { return c_; }
  double gamma() const noexcept { return gamma_; }

  double at(std::uint64_t n) const {
    return c_ * std::pow(static_cast<double>(n), -gamma_);
  }

private:
  double c_;
  double gamma_;
};

/// Which asymptotic regimes h = c n^{-gamma} falls into. Log factors never
/// move a strict power-law threshold, so each flag depends on (gamma, d)
/// only:
///   pointwise CLT       1/(d+4) < gamma < 1/d      (n h^d -> inf, n h^{d+4} -> 0)
///   LLN                 gamma < 1/(d+2)            (n h^{d+2} -> inf)
///   uniform consistency gamma < 1/(d+2)            (n h^{d+2} / log(1/h) -> inf)
///   uniform rate        1/(d+4) < gamma < 1/(d+2)  (also n h^{d+4} / log(1/h) -> 0)
/// A gamma sitting on a threshold is reported not-ok with on_boundary set.
struct RegimeReport {
  int d = 1;
  double gamma = 0.0;
  bool pointwise_clt_ok = false;
  bool lln_ok = false;
  bool uniform_consistency_ok = false;
  bool uniform_rate_ok = false;
  bool on_boundary = false;
  // exponent thresholds used
  double lower = 0.0;       // 1/(d+4)
  double middle = 0.0;      // 1/(d+2)
  double upper = 0.0;       // 1/d
};

inline RegimeReport classify_schedule(const BandwidthSchedule &schedule, int d) {
  if (d < 1)
    throw Error(ErrorKind::InvalidArgument, "intrinsic dimension must be >= 1");
  RegimeReport r;
  r.d = d;
  r.gamma = schedule.gamma();
  r.lower = 1.0 / (d + 4);
  r.middle = 1.0 / (d + 2);
  r.upper = 1.0 / d;
  const double g = r.gamma;
  auto at = [g](double t) { return std::abs(g - t) <= 1e-12 * t; };
  auto above = [&](double t) { return g > t && !at(t); };
  auto below = [&](double t) { return g < t && !at(t); };
  r.on_boundary = at(r.lower) || at(r.middle) || at(r.upper);
  r.pointwise_clt_ok = above(r.lower) && below(r.upper);
  r.lln_ok = below(r.middle);
  r.uniform_consistency_ok = below(r.middle);
  r.uniform_rate_ok = above(r.lower) && below(r.middle);
  return r;
}

/// Acceptance thresholds applied to experiment output.
struct Tolerances {
  double clt_variance_rel = 0.2;
  double ks_alpha = 0.01;
  double degenerate_max_deviation = 0.05;
  double uniform_bound_factor = 4.0;
  double lol_low = 0.5;
  double lol_high = 2.0;
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Human-readable intrinsic coordinates, e.g. "theta=0" or "u=1.5,v=0".
inline std::string point_label(const EmbeddedManifold &m, const ManifoldPoint &p) {
  switch (m.kind()) {
  case ManifoldKind::circle:
    return "theta=" + format_double(p.intrinsic[0]);
  case ManifoldKind::sphere:
    return "azimuth=" + format_double(p.intrinsic[0]) +
           ",polar=" + format_double(p.intrinsic[1]);
  case ManifoldKind::torus:
    return "u=" + format_double(p.intrinsic[0]) +
           ",v=" + format_double(p.intrinsic[1]);
  }
  return "";
}

/// (1/|mu|) Delta_M f(p), the limit of both estimators.
inline double laplacian_target(const TestFunction &f, const ManifoldPoint &p) {
  return f.analytic(p).laplacian / volume(f.manifold());
}

// ---------------------------------------------------------------- bias

struct BiasSweepResult {
  std::vector<ExperimentRecord> records;
  RateFit fit;
  /// errors non-increasing as h decreases
  bool monotone = true;
};

/// Deterministic bias |averaging_operator - target| over decreasing h.
inline BiasSweepResult run_bias_sweep(const EmbeddedManifold &m,
                                      const TestFunction &f,
                                      const ManifoldPoint &p,
                                      std::span<const double> h_list,
                                      const QuadratureSpec &quad = {}) {
  if (!(f.manifold() == m))
    throw Error(ErrorKind::ManifoldMismatch,
                "function does not live on " + m.describe());
  if (h_list.empty())
    throw Error(ErrorKind::EmptyInput, "bias sweep needs bandwidths");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    Bandwidth{h_list[i]};
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw Error(ErrorKind::InvalidArgument,
                  "bias sweep bandwidths must be strictly decreasing");
  }
  const double target = laplacian_target(f, p);
  BiasSweepResult out;
  std::vector<std::pair<double, double>> pairs;
  for (double h : h_list) {
    const AveragingResult avg = averaging_operator(p, f, Bandwidth{h}, m, quad);
    ExperimentRecord rec;
    rec.experiment = "bias-sweep";
    rec.manifold = m.describe();
    rec.function = f.id();
    rec.point = point_label(m, p);
    rec.h = h;
    rec.estimate = avg.value;
    rec.target = target;
    rec.error = std::abs(avg.value - target);
    if (!out.records.empty() && rec.error > out.records.back().error)
      out.monotone = false;
    pairs.emplace_back(h, rec.error);
    out.records.push_back(std::move(rec));
  }
  if (pairs.size() >= 2)
    out.fit = fit_log_log_slope(pairs);
  else
    out.fit.degenerate = true;
  return out;
}

// ---------------------------------------------------------------- CLT

struct CltReport {
  std::uint64_t n = 0;
  double h = 0.0;
  std::uint64_t base_seed = 0;
  std::size_t replications = 0;
  double target = 0.0;
  /// sqrt(n h^{d+2}) (graph Laplacian - target), one per replication
  std::vector<double> deviations;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double s2_theory = 0.0;
  /// s2_theory == 0: the deviations should vanish instead of being normal
  bool degenerate = false;
  double max_abs_deviation = 0.0;
  double ks_statistic = std::numeric_limits<double>::quiet_NaN();
  double ks_p_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<ExperimentRecord> records;
};

/// R independent replications of the scaled pointwise deviation. The stream
/// of replication k is seeded with mix_seed(base_seed, k).
inline CltReport run_pointwise_clt(const EmbeddedManifold &m,
                                   const TestFunction &f,
                                   const ManifoldPoint &p, std::uint64_t n,
                                   const BandwidthSchedule &schedule,
                                   std::size_t replications,
                                   std::uint64_t base_seed,
                                   unsigned workers = 1) {
  if (!(f.manifold() == m))
    throw Error(ErrorKind::ManifoldMismatch,
                "function does not live on " + m.describe());
  const int d = m.intrinsic_dim();
  if (!classify_schedule(schedule, d).pointwise_clt_ok)
    throw Error(ErrorKind::RegimeError,
                "bandwidth schedule outside the pointwise CLT window");
  if (replications < 100)
    throw Error(ErrorKind::InvalidArgument, "CLT needs at least 100 replications");
  if (n == 0)
    throw Error(ErrorKind::EmptySample, "CLT needs n >= 1");

  CltReport out;
  out.n = n;
  out.h = schedule.at(n);
  out.base_seed = base_seed;
  out.replications = replications;
  out.target = laplacian_target(f, p);
  out.s2_theory = clt_variance(f, m, p);
  out.degenerate = out.s2_theory == 0.0;

  const Bandwidth h{out.h};
  const double root = std::sqrt(static_cast<double>(n) * h.laplacian_scale(d));
  std::vector<double> estimates(replications);
  out.deviations.resize(replications);
  parallel_for(replications, workers, [&](std::size_t k) {
    const Sample sample = sample_uniform(m, n, mix_seed(base_seed, k));
    estimates[k] = graph_laplacian_at(p, sample, f, h);
    out.deviations[k] = root * (estimates[k] - out.target);
  });

  const MeanVariance mv = mean_variance(out.deviations);
  out.sample_mean = mv.mean;
  out.sample_variance = mv.variance;
  for (double dev : out.deviations)
    out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(dev));
  if (!out.degenerate) {
    const KsResult ks = ks_normality(out.deviations, std::sqrt(out.s2_theory));
    out.ks_statistic = ks.statistic;
    out.ks_p_value = ks.p_value;
  }

  out.records.reserve(replications);
  for (std::size_t k = 0; k < replications; ++k) {
    ExperimentRecord rec;
    rec.experiment = "clt";
    rec.manifold = m.describe();
    rec.function = f.id();
    rec.point = point_label(m, p);
    rec.n = n;
    rec.h = out.h;
    rec.seed = mix_seed(base_seed, k);
    rec.estimate = estimates[k];
    rec.target = out.target;
    rec.error = std::abs(estimates[k] - out.target);
    rec.scaled = out.deviations[k];
    out.records.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------- uniform

struct SupDeviation {
  std::uint64_t n = 0;
  double h = 0.0;
  /// E_n = max over (f, q) of |graph Laplacian - target|
  double sup_error = 0.0;
  std::string function; // argmax
  std::string point;    // argmax
  double estimate = 0.0;
  double target = 0.0;
};

namespace detail {

inline void check_sweep_inputs(const EmbeddedManifold &m,
                               std::span<const TestFunction> functions,
                               std::span<const ManifoldPoint> grid,
                               std::span<const std::uint64_t> n_list,
                               const BandwidthSchedule &schedule) {
  if (functions.empty() || grid.empty() || n_list.empty())
    throw Error(ErrorKind::EmptyInput,
                "sweep needs functions, grid points and sample sizes");
  for (const auto &f : functions)
    if (!(f.manifold() == m))
      throw Error(ErrorKind::ManifoldMismatch,
                  "function does not live on " + m.describe());
  for (const auto &q : grid)
    if (!m.contains(q.ambient, 1e-8))
      throw Error(ErrorKind::ManifoldMismatch,
                  "grid point does not lie on " + m.describe());
  if (!classify_schedule(schedule, m.intrinsic_dim()).uniform_rate_ok)
    throw Error(ErrorKind::RegimeError,
                "bandwidth schedule outside the uniform-rate window");
  for (auto n : n_list) {
    if (n == 0)
      throw Error(ErrorKind::EmptySample, "sample sizes must be >= 1");
    if (!(schedule.at(n) < 1.0))
      throw Error(ErrorKind::DomainError,
                  "scaled sup statistics need h < 1 (log(1/h) > 0)");
  }
}

/// Sample for size n is sample_uniform(m, n, seed); since sampling is
/// sequential, the samples for increasing n are prefixes of one sequence.
inline SupDeviation sup_deviation(const EmbeddedManifold &m,
                                  std::span<const TestFunction> functions,
                                  std::span<const ManifoldPoint> grid,
                                  std::uint64_t n, double h_value,
                                  std::uint64_t seed, unsigned workers) {
  const Sample sample = sample_uniform(m, n, seed);
  const Bandwidth h{h_value};
  const std::size_t nq = grid.size();
  // fully materialized before reduction: schedule independent
  std::vector<double> estimates(functions.size() * nq);
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    const TestFunction &f = functions[fi];
    const auto values = evaluate_on(sample, f);
    parallel_for(nq, workers, [&](std::size_t qi) {
      estimates[fi * nq + qi] =
          graph_laplacian_from_values(grid[qi].ambient, f(grid[qi]), sample, values, h);
    });
  }
  SupDeviation out;
  out.n = n;
  out.h = h_value;
  bool first = true;
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    for (std::size_t qi = 0; qi < nq; ++qi) {
      const double target = laplacian_target(functions[fi], grid[qi]);
      const double est = estimates[fi * nq + qi];
      const double err = std::abs(est - target);
      if (first || err > out.sup_error) {
        first = false;
        out.sup_error = err;
        out.function = functions[fi].id();
        out.point = point_label(m, grid[qi]);
        out.estimate = est;
        out.target = target;
      }
    }
  }
  return out;
}

} // namespace detail

struct UniformSweepRow {
  SupDeviation sup;
  /// S_n = E_n sqrt(n h^{d+2} / log(1/h))
  double scaled = 0.0;
};

struct UniformSweepResult {
  std::vector<UniformSweepRow> rows;
  std::vector<ExperimentRecord> records;

  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].sup.sup_error < rows[i - 1].sup.sup_error))
        return false;
    return true;
  }

  /// max S_n / min S_n; NaN when some S_n is zero.
  double scaled_spread() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto &r : rows) {
      lo = std::min(lo, r.scaled);
      hi = std::max(hi, r.scaled);
    }
    if (rows.empty() || !(lo > 0.0))
      return std::numeric_limits<double>::quiet_NaN();
    return hi / lo;
  }
};

inline ExperimentRecord sweep_record(const char *experiment,
                                     const EmbeddedManifold &m,
                                     const SupDeviation &s, std::uint64_t seed,
                                     double scaled) {
  ExperimentRecord rec;
  rec.experiment = experiment;
  rec.manifold = m.describe();
  rec.function = s.function;
  rec.point = s.point;
  rec.n = s.n;
  rec.h = s.h;
  rec.seed = seed;
  rec.estimate = s.estimate;
  rec.target = s.target;
  rec.error = s.sup_error;
  rec.scaled = scaled;
  return rec;
}

/// Sup-norm deviation over F x q_grid for each n in n_list.
inline UniformSweepResult
run_uniform_sweep(const EmbeddedManifold &m, std::span<const TestFunction> functions,
                  std::span<const ManifoldPoint> grid,
                  std::span<const std::uint64_t> n_list,
                  const BandwidthSchedule &schedule, std::uint64_t seed,
                  unsigned workers = 1) {
  detail::check_sweep_inputs(m, functions, grid, n_list, schedule);
  const int d = m.intrinsic_dim();
  UniformSweepResult out;
  for (auto n : n_list) {
    const double h = schedule.at(n);
    UniformSweepRow row;
    row.sup = detail::sup_deviation(m, functions, grid, n, h, seed, workers);
    row.scaled = row.sup.sup_error *
                 std::sqrt(static_cast<double>(n) * std::pow(h, d + 2) /
                           std::log(1.0 / h));
    out.records.push_back(sweep_record("uniform-sweep", m, row.sup, seed, row.scaled));
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------- LoL

struct LolRow {
  SupDeviation sup;
  /// T_n = sqrt(n h^{d+2} / (2 log h^{-d})) E_n
  double scaled = 0.0;
  /// T_n / constant; NaN when the constant is zero
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

struct LolReport {
  double constant = 0.0;
  bool degenerate = false;
  std::vector<LolRow> rows;
  std::vector<ExperimentRecord> records;
};

/// Scaled sup deviation against the law-of-the-logarithm constant, which is
/// evaluated on a parameter grid with `constant_grid` nodes per dimension.
inline LolReport run_law_of_logarithm(const EmbeddedManifold &m,
                                      std::span<const TestFunction> functions,
                                      std::span<const ManifoldPoint> grid,
                                      std::span<const std::uint64_t> n_list,
                                      const BandwidthSchedule &schedule,
                                      std::uint64_t seed, unsigned workers = 1,
                                      std::size_t constant_grid = 512) {
  detail::check_sweep_inputs(m, functions, grid, n_list, schedule);
  const int d = m.intrinsic_dim();
  LolReport out;
  const auto fine = parameter_grid(m, constant_grid);
  out.constant = lol_constant(functions, m, fine);
  out.degenerate = out.constant == 0.0;
  for (auto n : n_list) {
    const double h = schedule.at(n);
    LolRow row;
    row.sup = detail::sup_deviation(m, functions, grid, n, h, seed, workers);
    row.scaled = std::sqrt(static_cast<double>(n) * std::pow(h, d + 2) /
                           (2.0 * d * std::log(1.0 / h))) *
                 row.sup.sup_error;
    if (!out.degenerate)
      row.ratio = row.scaled / out.constant;
    out.records.push_back(sweep_record("lol", m, row.sup, seed, row.scaled));
    out.rows.push_back(std::move(row));
  }
  return out;
}

} // namespace graphlap
