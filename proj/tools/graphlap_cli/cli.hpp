#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <graphlap/graphlap.hpp>

#include "output.hpp"

namespace graphlap::cli {

inline constexpr const char *kRevision = "graphlap-1";

/// Every option of every subcommand; which ones are used depends on the
/// command. Field names mirror the flag names.
struct RunConfig {
  std::string command;
  std::string manifold = "circle";
  double r = 1.0;
  double major = 2.0;
  std::vector<std::string> f;
  std::string point;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> n_list;
  std::optional<double> h;
  std::vector<double> h_list{0.2, 0.1, 0.05, 0.025};
  double c = 1.0;
  double gamma = 0.25;
  std::size_t R = 400;
  std::uint64_t seed = 1;
  std::size_t grid = 64;
  std::size_t const_grid = 512;
  int d = 1;
  double rel_tol = 1e-4;
  std::size_t max_nodes = std::size_t{1} << 20;
  bool normalized = false;
  bool literal_normalized = false;
  Tolerances tol;
  std::string out;
  std::string format;
  bool no_timestamp = false;
  unsigned workers = default_workers();
  std::string config_path;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ parsing helpers

/// Angle literal: a number, or a multiple/fraction of pi ("pi/2", "3pi/2",
/// "1.5*pi").
inline double parse_angle(std::string s) {
  std::erase(s, ' ');
  auto number = [&](const std::string &t, double fallback) {
    if (t.empty())
      return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != t.size())
      throw UsageError("bad angle '" + s + "'");
    return v;
  };
  const auto at = s.find("pi");
  if (at == std::string::npos)
    return number(s, 0.0);
  std::string coef = s.substr(0, at);
  if (!coef.empty() && coef.back() == '*')
    coef.pop_back();
  if (coef == "-")
    coef = "-1";
  std::string rest = s.substr(at + 2);
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/')
      throw UsageError("bad angle '" + s + "'");
    den = number(rest.substr(1), 0.0);
  }
  if (den == 0.0)
    throw UsageError("bad angle '" + s + "'");
  return number(coef, 1.0) * pi / den;
}

/// Point anchors: "north", "south", "theta=X", "azimuth=A,polar=P",
/// "u=X,v=Y". Empty selects the default anchor of the manifold.
inline ManifoldPoint parse_point(const EmbeddedManifold &m, const std::string &spec) {
  if (spec.empty()) {
    switch (m.kind()) {
    case ManifoldKind::circle:
      return m.at(0.0);
    case ManifoldKind::sphere:
      return m.at(0.0, 0.0);
    case ManifoldKind::torus:
      return m.at(0.0, 0.0);
    }
  }
  if (spec == "north" || spec == "south") {
    if (m.kind() != ManifoldKind::sphere)
      throw UsageError("anchor '" + spec + "' needs the sphere");
    return m.at(0.0, spec == "north" ? 0.0 : pi);
  }
  std::map<std::string, double> kv;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      throw UsageError("bad point '" + spec + "'");
    kv[part.substr(0, eq)] = parse_angle(part.substr(eq + 1));
  }
  auto take = [&](const char *key) {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw UsageError("point '" + spec + "' lacks '" + key + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  ManifoldPoint p;
  switch (m.kind()) {
  case ManifoldKind::circle:
    p = m.at(take("theta"));
    break;
  case ManifoldKind::sphere: {
    const double polar = take("polar");
    const double az = kv.count("azimuth") ? take("azimuth") : 0.0;
    if (!(polar >= 0.0 && polar <= pi))
      throw UsageError("polar angle must lie in [0, pi]");
    p = m.at(az, polar);
    break;
  }
  case ManifoldKind::torus: {
    const double u = take("u");
    const double v = take("v");
    p = m.at(u, v);
    break;
  }
  }
  if (!kv.empty())
    throw UsageError("point '" + spec + "' has unexpected coordinates for " +
                     m.describe());
  return p;
}

inline EmbeddedManifold make_manifold(const RunConfig &cfg) {
  try {
    if (cfg.manifold == "circle")
      return EmbeddedManifold::circle(cfg.r);
    if (cfg.manifold == "sphere")
      return EmbeddedManifold::sphere(cfg.r);
    if (cfg.manifold == "torus")
      return EmbeddedManifold::torus(cfg.major, cfg.r);
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown manifold '" + cfg.manifold + "'");
}

inline std::vector<TestFunction> make_functions(const EmbeddedManifold &m,
                                                const RunConfig &cfg) {
  if (cfg.f.empty())
    return TestFunction::default_class(m);
  std::vector<TestFunction> out;
  try {
    for (const auto &id : cfg.f)
      out.push_back(TestFunction::parse(m, id));
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  return out;
}

inline TestFunction single_function(const EmbeddedManifold &m, const RunConfig &cfg) {
  if (cfg.f.size() != 1)
    throw UsageError("command '" + cfg.command + "' needs exactly one --f");
  return make_functions(m, cfg).front();
}

inline OutputFormat resolve_format(const RunConfig &cfg, OutputFormat fallback) {
  if (cfg.format == "csv")
    return OutputFormat::csv;
  if (cfg.format == "json")
    return OutputFormat::json;
  if (!cfg.format.empty())
    throw UsageError("unknown format '" + cfg.format + "'");
  if (cfg.out.size() >= 5 && cfg.out.ends_with(".json"))
    return OutputFormat::json;
  if (cfg.out.size() >= 4 && cfg.out.ends_with(".csv"))
    return OutputFormat::csv;
  return fallback;
}

// ------------------------------------------------------------ resolved config

inline nlohmann::json tolerances_json(const Tolerances &t) {
  return {{"tol-variance", t.clt_variance_rel},
          {"ks-alpha", t.ks_alpha},
          {"degenerate-max", t.degenerate_max_deviation},
          {"bound-factor", t.uniform_bound_factor},
          {"lol-low", t.lol_low},
          {"lol-high", t.lol_high}};
}

/// Config with defaults filled in, restricted to keys that influence the
/// command's results. `workers` is omitted on purpose: it never changes
/// numbers.
inline nlohmann::json resolved_config(const RunConfig &cfg,
                                      const EmbeddedManifold *m,
                                      const std::vector<TestFunction> *fs,
                                      const ManifoldPoint *p) {
  nlohmann::json j;
  j["revision"] = kRevision;
  j["command"] = cfg.command;
  if (cfg.command == "classify") {
    j["d"] = cfg.d;
    j["gamma"] = cfg.gamma;
    j["c"] = cfg.c;
    return j;
  }
  j["manifold"] = cfg.manifold;
  j["r"] = cfg.r;
  if (m && m->kind() == ManifoldKind::torus)
    j["major"] = cfg.major;
  if (fs) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto &f : *fs)
      ids.push_back(f.id());
    j["f"] = ids;
  }
  if (p && m)
    j["point"] = point_label(*m, *p);
  const std::string &c = cfg.command;
  if (c == "estimate" || c == "clt" || c == "export-matrix")
    j["n"] = cfg.n;
  if (c == "uniform-sweep" || c == "lol")
    j["n-list"] = cfg.n_list;
  if ((c == "estimate" || c == "export-matrix") && cfg.h)
    j["h"] = *cfg.h;
  if (c == "bias-sweep") {
    j["h-list"] = cfg.h_list;
    j["rel-tol"] = cfg.rel_tol;
    j["max-nodes"] = cfg.max_nodes;
  }
  if (((c == "estimate" || c == "export-matrix") && !cfg.h) || c == "clt" ||
      c == "uniform-sweep" || c == "lol") {
    j["c"] = cfg.c;
    j["gamma"] = cfg.gamma;
  }
  if (c == "clt")
    j["R"] = cfg.R;
  if (c != "bias-sweep")
    j["seed"] = cfg.seed;
  if (c == "uniform-sweep" || c == "lol")
    j["grid"] = cfg.grid;
  if (c == "lol")
    j["const-grid"] = cfg.const_grid;
  if (c == "export-matrix") {
    j["normalized"] = cfg.normalized;
    j["literal-normalized"] = cfg.literal_normalized;
  }
  if (c == "clt" || c == "uniform-sweep" || c == "lol")
    j.update(tolerances_json(cfg.tol));
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------ emission

class Emitter {
public:
  Emitter(const RunConfig &cfg, std::ostream &stdout_stream)
      : cfg_(cfg), stdout_(stdout_stream) {}

  /// Record stream with the config (and timestamp) as leading '#' lines.
  void csv(std::span<const ExperimentRecord> records, const nlohmann::json &config) {
    std::ostringstream os;
    os << "# config: " << config.dump() << '\n';
    if (!cfg_.no_timestamp)
      os << "# timestamp: " << utc_timestamp() << '\n';
    write_csv(os, records);
    write(cfg_.out, os.str());
  }

  /// JSON object; "config" and "timestamp" lead.
  void json(nlohmann::json body, const nlohmann::json &config) {
    nlohmann::ordered_json doc;
    doc["config"] = config;
    if (!cfg_.no_timestamp)
      doc["timestamp"] = utc_timestamp();
    for (auto &[k, v] : body.items())
      doc[k] = v;
    write(cfg_.out, doc.dump(2) + "\n");
  }

  void write(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
      stdout_ << text;
      return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
      throw IoError("cannot open '" + path + "' for writing");
    os << text;
    os.flush();
    if (!os)
      throw IoError("write to '" + path + "' failed");
  }

private:
  const RunConfig &cfg_;
  std::ostream &stdout_;
};

// ------------------------------------------------------------ commands

inline Bandwidth resolve_bandwidth(const RunConfig &cfg) {
  try {
    if (cfg.h)
      return Bandwidth{*cfg.h};
    return Bandwidth{BandwidthSchedule(cfg.c, cfg.gamma).at(cfg.n)};
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
}

inline BandwidthSchedule resolve_schedule(const RunConfig &cfg) {
  try {
    return BandwidthSchedule(cfg.c, cfg.gamma);
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
}

inline void run_estimate(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  const auto f = single_function(m, cfg);
  const auto p = parse_point(m, cfg.point);
  if (cfg.n == 0)
    throw UsageError("estimate needs --n >= 1");
  const Bandwidth h = resolve_bandwidth(cfg);
  const std::vector<TestFunction> fs{f};
  const auto config = resolved_config(cfg, &m, &fs, &p);

  const Sample sample = sample_uniform(m, cfg.n, cfg.seed);
  ExperimentRecord rec;
  rec.experiment = "estimate";
  rec.manifold = m.describe();
  rec.function = f.id();
  rec.point = point_label(m, p);
  rec.n = cfg.n;
  rec.h = h.value();
  rec.seed = cfg.seed;
  rec.estimate = graph_laplacian_at(p, sample, f, h);
  rec.target = laplacian_target(f, p);
  rec.error = std::abs(rec.estimate - rec.target);
  rec.scaled = std::sqrt(static_cast<double>(cfg.n) *
                         h.laplacian_scale(m.intrinsic_dim())) *
               (rec.estimate - rec.target);
  const std::vector<ExperimentRecord> records{rec};
  if (resolve_format(cfg, OutputFormat::csv) == OutputFormat::csv)
    emit.csv(records, config);
  else
    emit.json({{"records", records_json(records)}}, config);
}

inline void run_bias(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  const auto f = single_function(m, cfg);
  const auto p = parse_point(m, cfg.point);
  const std::vector<TestFunction> fs{f};
  const auto config = resolved_config(cfg, &m, &fs, &p);
  QuadratureSpec quad;
  quad.rel_tol_per_h = cfg.rel_tol;
  quad.max_nodes = cfg.max_nodes;
  const BiasSweepResult res = run_bias_sweep(m, f, p, cfg.h_list, quad);
  if (resolve_format(cfg, OutputFormat::csv) == OutputFormat::csv) {
    emit.csv(res.records, config);
    return;
  }
  emit.json({{"records", records_json(res.records)},
             {"monotone", res.monotone},
             {"fit",
              {{"slope", json_real(res.fit.slope)},
               {"intercept", json_real(res.fit.intercept)},
               {"r_squared", json_real(res.fit.r_squared)},
               {"degenerate", res.fit.degenerate}}}},
            config);
}

inline void run_clt(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  const auto f = single_function(m, cfg);
  const auto p = parse_point(m, cfg.point);
  if (cfg.n == 0)
    throw UsageError("clt needs --n >= 1");
  const auto schedule = resolve_schedule(cfg);
  const std::vector<TestFunction> fs{f};
  const auto config = resolved_config(cfg, &m, &fs, &p);
  const CltReport rep =
      run_pointwise_clt(m, f, p, cfg.n, schedule, cfg.R, cfg.seed, cfg.workers);
  if (resolve_format(cfg, OutputFormat::json) == OutputFormat::csv) {
    emit.csv(rep.records, config);
    return;
  }
  nlohmann::json verdict;
  if (rep.degenerate) {
    verdict["max_abs_deviation_ok"] =
        rep.max_abs_deviation <= cfg.tol.degenerate_max_deviation;
  } else {
    verdict["variance_ok"] = std::abs(rep.sample_variance - rep.s2_theory) <=
                             cfg.tol.clt_variance_rel * rep.s2_theory;
    verdict["ks_ok"] = rep.ks_p_value > cfg.tol.ks_alpha;
  }
  emit.json({{"n", rep.n},
             {"h", rep.h},
             {"R", rep.replications},
             {"target", json_real(rep.target)},
             {"deviations", rep.deviations},
             {"sample_mean", json_real(rep.sample_mean)},
             {"sample_variance", json_real(rep.sample_variance)},
             {"s2_theory", json_real(rep.s2_theory)},
             {"degenerate", rep.degenerate},
             {"max_abs_deviation", json_real(rep.max_abs_deviation)},
             {"ks_stat", json_real(rep.ks_statistic)},
             {"ks_p", json_real(rep.ks_p_value)},
             {"verdict", verdict}},
            config);
}

inline std::vector<std::uint64_t> resolve_n_list(const RunConfig &cfg) {
  if (!cfg.n_list.empty())
    return cfg.n_list;
  if (cfg.n > 0)
    return {cfg.n};
  throw UsageError("command '" + cfg.command + "' needs --n-list");
}

inline void run_uniform(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  const auto fs = make_functions(m, cfg);
  RunConfig resolved = cfg;
  resolved.n_list = resolve_n_list(cfg);
  const auto schedule = resolve_schedule(cfg);
  const auto grid = parameter_grid(m, cfg.grid);
  const auto config = resolved_config(resolved, &m, &fs, nullptr);
  const auto res = run_uniform_sweep(m, fs, grid, resolved.n_list, schedule,
                                     cfg.seed, cfg.workers);
  if (resolve_format(cfg, OutputFormat::csv) == OutputFormat::csv) {
    emit.csv(res.records, config);
    return;
  }
  const double spread = res.scaled_spread();
  emit.json({{"records", records_json(res.records)},
             {"strictly_decreasing", res.strictly_decreasing()},
             {"scaled_spread", json_real(spread)},
             {"verdict",
              {{"decreasing_ok", res.strictly_decreasing()},
               {"bounded_ok", spread <= cfg.tol.uniform_bound_factor}}}},
            config);
}

inline void run_lol(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  const auto fs = make_functions(m, cfg);
  RunConfig resolved = cfg;
  resolved.n_list = resolve_n_list(cfg);
  const auto schedule = resolve_schedule(cfg);
  const auto grid = parameter_grid(m, cfg.grid);
  const auto config = resolved_config(resolved, &m, &fs, nullptr);
  const auto rep = run_law_of_logarithm(m, fs, grid, resolved.n_list, schedule,
                                        cfg.seed, cfg.workers, cfg.const_grid);
  if (resolve_format(cfg, OutputFormat::csv) == OutputFormat::csv) {
    emit.csv(rep.records, config);
    return;
  }
  nlohmann::json ratios = nlohmann::json::array();
  bool in_bracket = !rep.degenerate;
  for (const auto &row : rep.rows) {
    ratios.push_back(json_real(row.ratio));
    in_bracket = in_bracket && row.ratio >= cfg.tol.lol_low &&
                 row.ratio <= cfg.tol.lol_high;
  }
  emit.json({{"records", records_json(rep.records)},
             {"constant", json_real(rep.constant)},
             {"degenerate", rep.degenerate},
             {"ratios", ratios},
             {"verdict", {{"bracket_ok", in_bracket}}}},
            config);
}

inline void run_classify(const RunConfig &cfg, Emitter &emit) {
  const auto schedule = resolve_schedule(cfg);
  if (cfg.d < 1)
    throw UsageError("--d must be >= 1");
  const auto rep = classify_schedule(schedule, cfg.d);
  const auto config = resolved_config(cfg, nullptr, nullptr, nullptr);
  emit.json({{"pointwise_clt_ok", rep.pointwise_clt_ok},
             {"lln_ok", rep.lln_ok},
             {"uniform_consistency_ok", rep.uniform_consistency_ok},
             {"uniform_rate_ok", rep.uniform_rate_ok},
             {"on_boundary", rep.on_boundary},
             {"thresholds",
              {{"1/(d+4)", rep.lower}, {"1/(d+2)", rep.middle}, {"1/d", rep.upper}}}},
            config);
}

inline void run_export(const RunConfig &cfg, Emitter &emit) {
  const auto m = make_manifold(cfg);
  if (cfg.n == 0)
    throw UsageError("export-matrix needs --n >= 1");
  if (cfg.out.empty())
    throw UsageError("export-matrix needs --out <prefix>");
  const Bandwidth h = resolve_bandwidth(cfg);
  const auto config = resolved_config(cfg, &m, nullptr, nullptr);
  const Sample sample = sample_uniform(m, cfg.n, cfg.seed);
  const WeightMatrix W = weight_matrix(sample, h);
  const auto lap = laplacian_matrices(W, cfg.literal_normalized
                                             ? NormalizedForm::literal
                                             : NormalizedForm::conventional);
  auto coo = [&](const Eigen::MatrixXd &mat) {
    std::ostringstream os;
    os << "# config: " << config.dump() << '\n';
    os << "i,j,value\n";
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
      for (Eigen::Index j = 0; j < mat.cols(); ++j)
        os << i << ',' << j << ',' << format_real(mat(i, j)) << '\n';
    return os.str();
  };
  std::vector<std::string> files{cfg.out + "W.csv", cfg.out + "L.csv"};
  emit.write(files[0], coo(W.w));
  emit.write(files[1], coo(lap.unnormalized));
  if (cfg.normalized || cfg.literal_normalized) {
    files.push_back(cfg.out + "Lnorm.csv");
    emit.write(files.back(), coo(lap.normalized));
  }
  nlohmann::json summary{{"files", files}, {"n", cfg.n}, {"h", h.value()}};
  std::ostringstream os;
  os << summary.dump() << '\n';
  emit.write("-", os.str());
}

// ------------------------------------------------------------ dispatch

namespace detail {

inline void add_tolerance_flags(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--tol-variance", cfg.tol.clt_variance_rel,
                  "relative band for the CLT variance");
  sub->add_option("--ks-alpha", cfg.tol.ks_alpha, "KS significance level");
  sub->add_option("--degenerate-max", cfg.tol.degenerate_max_deviation,
                  "max |deviation| at a critical point");
  sub->add_option("--bound-factor", cfg.tol.uniform_bound_factor,
                  "max S_n / min S_n bound");
  sub->add_option("--lol-low", cfg.tol.lol_low, "lower LoL ratio bracket");
  sub->add_option("--lol-high", cfg.tol.lol_high, "upper LoL ratio bracket");
}

inline void add_common(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--manifold", cfg.manifold, "circle | sphere | torus")
      ->check(CLI::IsMember({"circle", "sphere", "torus"}));
  sub->add_option("--r", cfg.r, "radius (minor radius of the torus)");
  sub->add_option("--major", cfg.major, "major radius of the torus");
  sub->add_option("--seed", cfg.seed, "base seed");
  sub->add_option("--workers", cfg.workers, "worker threads");
}

inline void add_output(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--out", cfg.out, "output path ('-' or empty: stdout)");
  sub->add_option("--format", cfg.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--no-timestamp", cfg.no_timestamp, "omit the timestamp line");
  sub->add_option("--config", cfg.config_path, "JSON config file; flags win");
}

inline void add_function(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--f", cfg.f, "test function id(s)")->delimiter(',');
  sub->add_option("--point", cfg.point, "north | theta=X | u=X,v=Y | azimuth=A,polar=P");
}

inline std::unique_ptr<CLI::App> build_app(RunConfig &cfg) {
  auto app = std::make_unique<CLI::App>(
      "Empirical graph Laplacians on sampled test manifolds", "graphlap");
  app->require_subcommand(1);
  // "-h" would clash with the bandwidth flag "--h".
  app->set_help_flag("--help", "print this help and exit");

  auto *est = app->add_subcommand("estimate", "graph Laplacian at one point");
  add_common(est, cfg);
  add_function(est, cfg);
  est->add_option("--n", cfg.n, "sample size");
  est->add_option("--h", cfg.h, "bandwidth (else c n^-gamma)");
  est->add_option("--c", cfg.c);
  est->add_option("--gamma", cfg.gamma);
  add_output(est, cfg);

  auto *bias = app->add_subcommand("bias-sweep", "deterministic bias over bandwidths");
  add_common(bias, cfg);
  add_function(bias, cfg);
  bias->add_option("--h-list", cfg.h_list, "decreasing bandwidths")->delimiter(',');
  bias->add_option("--rel-tol", cfg.rel_tol, "quadrature tolerance per unit h");
  bias->add_option("--max-nodes", cfg.max_nodes, "quadrature node cap");
  add_output(bias, cfg);

  auto *clt = app->add_subcommand("clt", "pointwise CLT replications");
  add_common(clt, cfg);
  add_function(clt, cfg);
  clt->add_option("--n", cfg.n, "sample size");
  clt->add_option("--c", cfg.c);
  clt->add_option("--gamma", cfg.gamma);
  clt->add_option("--R", cfg.R, "replications");
  add_tolerance_flags(clt, cfg);
  add_output(clt, cfg);

  for (const char *name : {"uniform-sweep", "lol"}) {
    auto *sub = app->add_subcommand(
        name, std::string(name) == "lol" ? "law-of-logarithm bracketing"
                                         : "sup-norm deviation over n");
    add_common(sub, cfg);
    sub->add_option("--f", cfg.f, "function class")->delimiter(',');
    sub->add_option("--n-list", cfg.n_list, "sample sizes")->delimiter(',');
    sub->add_option("--n", cfg.n, "single sample size");
    sub->add_option("--c", cfg.c);
    sub->add_option("--gamma", cfg.gamma);
    sub->add_option("--grid", cfg.grid, "grid nodes per angular dimension");
    if (std::string(name) == "lol")
      sub->add_option("--const-grid", cfg.const_grid,
                      "grid nodes per dimension for the constant");
    add_tolerance_flags(sub, cfg);
    add_output(sub, cfg);
  }

  auto *exp = app->add_subcommand("export-matrix", "write W and L as COO CSV");
  add_common(exp, cfg);
  exp->add_option("--n", cfg.n, "sample size");
  exp->add_option("--h", cfg.h, "bandwidth (else c n^-gamma)");
  exp->add_option("--c", cfg.c);
  exp->add_option("--gamma", cfg.gamma);
  exp->add_flag("--normalized", cfg.normalized, "also write Lnorm");
  exp->add_flag("--literal-normalized", cfg.literal_normalized,
                "Lnorm = I - D^-1/2 L D^-1/2 instead of W inside");
  add_output(exp, cfg);

  auto *cls = app->add_subcommand("classify", "bandwidth regime flags");
  cls->add_option("--d", cfg.d, "intrinsic dimension")->required();
  cls->add_option("--gamma", cfg.gamma, "exponent")->required();
  cls->add_option("--c", cfg.c);
  add_output(cls, cfg);
  return app;
}

inline CLI::App *chosen(CLI::App &app) {
  const auto subs = app.get_subcommands();
  return subs.empty() ? nullptr : subs.front();
}

/// Turns a JSON config object into flags for options not given on the
/// command line.
inline std::vector<std::string> config_flags(CLI::App &sub, const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw UsageError("cannot read config '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception &e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
  if (!j.is_object())
    throw UsageError("config '" + path + "' must be a JSON object");
  std::vector<std::string> extra;
  for (const auto &[key, value] : j.items()) {
    if (key == "command" || key == "revision")
      continue;
    CLI::Option *opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound &) {
      throw UsageError("config key '" + key + "' is not an option of '" +
                       sub.get_name() + "'");
    }
    if (opt->count() > 0)
      continue; // command line wins
    auto scalar = [](const nlohmann::json &v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_boolean()) {
      if (value.get<bool>())
        extra.push_back("--" + key);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto &v : value)
        joined += (joined.empty() ? "" : ",") + scalar(v);
      extra.push_back("--" + key);
      extra.push_back(joined);
    } else {
      extra.push_back("--" + key);
      extra.push_back(scalar(value));
    }
  }
  return extra;
}

inline int parse_args(CLI::App &app, const std::vector<std::string> &args,
                      std::ostream &out, std::ostream &err, bool &done) {
  std::vector<const char *> argv;
  argv.reserve(args.size());
  for (const auto &a : args)
    argv.push_back(a.c_str());
  done = false;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success &e) {
    done = true;
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    done = true;
    app.exit(e, out, err);
    return 2;
  }
  return 0;
}

} // namespace detail

/// Entry point of the CLI. Exit codes: 0 success, 1 runtime failure
/// (structured JSON on `err`), 2 usage error.
inline int dispatch(int argc, const char *const *argv, std::ostream &out,
                    std::ostream &err) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.empty())
    args.emplace_back("graphlap");

  RunConfig cfg;
  auto app = detail::build_app(cfg);
  bool done = false;
  if (const int rc = detail::parse_args(*app, args, out, err, done); done)
    return rc;

  try {
    CLI::App *sub = detail::chosen(*app);
    if (!cfg.config_path.empty()) {
      auto extra = detail::config_flags(*sub, cfg.config_path);
      if (!extra.empty()) {
        args.insert(args.end(), extra.begin(), extra.end());
        cfg = RunConfig{};
        app = detail::build_app(cfg);
        if (const int rc = detail::parse_args(*app, args, out, err, done); done)
          return rc;
        sub = detail::chosen(*app);
      }
    }
    cfg.command = sub->get_name();

    Emitter emit(cfg, out);
    if (cfg.command == "estimate")
      run_estimate(cfg, emit);
    else if (cfg.command == "bias-sweep")
      run_bias(cfg, emit);
    else if (cfg.command == "clt")
      run_clt(cfg, emit);
    else if (cfg.command == "uniform-sweep")
      run_uniform(cfg, emit);
    else if (cfg.command == "lol")
      run_lol(cfg, emit);
    else if (cfg.command == "export-matrix")
      run_export(cfg, emit);
    else if (cfg.command == "classify")
      run_classify(cfg, emit);
    return 0;
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error &e) {
    err << nlohmann::json{{"error", std::string(e.kind_name())},
                          {"message", e.what()}}
               .dump()
        << '\n';
    return 1;
  } catch (const IoError &e) {
    err << nlohmann::json{{"error", "IoError"}, {"message", e.what()}}.dump()
        << '\n';
    return 1;
  }
}

} // namespace graphlap::cli
