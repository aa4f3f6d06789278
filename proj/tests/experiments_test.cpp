#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <graphlap/graphlap.hpp>

using namespace graphlap;

namespace {

const auto kCircle = EmbeddedManifold::circle(1.0);
const auto kSphere = EmbeddedManifold::sphere(1.0);

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no graphlap::Error thrown";
  return ErrorKind::InvalidArgument;
}

} // namespace

// ------------------------------------------------------------- regimes

TEST(Classify, TruthTableCircle) {
  // d = 1: thresholds 1/5, 1/3, 1
  struct Row {
    double gamma;
    bool clt, lln, unif, rate, boundary;
  };
  const Row rows[] = {
      {0.1, false, true, true, false, false},
      {0.2, false, true, true, false, true},
      {0.25, true, true, true, true, false},
      {1.0 / 3.0, true, false, false, false, true},
      {0.5, true, false, false, false, false},
      {1.0, false, false, false, false, true},
      {1.5, false, false, false, false, false},
  };
  for (const auto &r : rows) {
    const auto rep = classify_schedule(BandwidthSchedule(1.0, r.gamma), 1);
    EXPECT_EQ(rep.pointwise_clt_ok, r.clt) << r.gamma;
    EXPECT_EQ(rep.lln_ok, r.lln) << r.gamma;
    EXPECT_EQ(rep.uniform_consistency_ok, r.unif) << r.gamma;
    EXPECT_EQ(rep.uniform_rate_ok, r.rate) << r.gamma;
    EXPECT_EQ(rep.on_boundary, r.boundary) << r.gamma;
  }
}

TEST(Classify, SphereWindows) {
  // d = 2: thresholds 1/6, 1/4, 1/2
  auto rep = classify_schedule(BandwidthSchedule(1.0, 0.2), 2);
  EXPECT_TRUE(rep.pointwise_clt_ok && rep.lln_ok && rep.uniform_rate_ok);
  rep = classify_schedule(BandwidthSchedule(1.0, 0.25), 2);
  EXPECT_TRUE(rep.on_boundary);
  EXPECT_FALSE(rep.lln_ok || rep.uniform_rate_ok);
  EXPECT_TRUE(rep.pointwise_clt_ok);
  EXPECT_NEAR(rep.lower, 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(rep.middle, 0.25, 1e-16);
  EXPECT_NEAR(rep.upper, 0.5, 1e-16);
}

TEST(Classify, DecimalBoundaryIsDetected) {
  EXPECT_TRUE(classify_schedule(BandwidthSchedule(1.0, 0.3333333333333333), 1).on_boundary);
}

TEST(Classify, MonotoneInGamma) {
  // Consistency windows only shrink as gamma grows past 1/(d+2).
  for (int d = 1; d <= 4; ++d) {
    bool seen_false = false;
    for (int k = 1; k < 200; ++k) {
      const bool ok = classify_schedule(BandwidthSchedule(1.0, k / 200.0), d).lln_ok;
      if (!ok)
        seen_false = true;
      EXPECT_FALSE(seen_false && ok) << d << " " << k;
    }
  }
}

TEST(Classify, ScheduleValidation) {
  EXPECT_EQ(kind_of([] { BandwidthSchedule(0.0, 0.2); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { BandwidthSchedule(1.0, -0.2); }), ErrorKind::InvalidArgument);
  EXPECT_NEAR(BandwidthSchedule(2.0, 0.5).at(16), 0.5, 1e-16);
}

// ---------------------------------------------------------- bias sweep

TEST(BiasSweep, CircleBiasDecaysQuadratically) {
  const auto f = TestFunction::parse(kCircle, "cos");
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  const auto res = run_bias_sweep(kCircle, f, kCircle.at(0.0), hs);
  ASSERT_EQ(res.records.size(), 4u);
  EXPECT_TRUE(res.monotone);
  EXPECT_FALSE(res.fit.degenerate);
  EXPECT_GE(res.fit.slope, 0.9);
  EXPECT_NEAR(res.fit.slope, 2.0, 0.1);
  for (const auto &r : res.records) {
    EXPECT_EQ(r.experiment, "bias-sweep");
    EXPECT_NEAR(r.target, -1.0 / (2 * M_PI), 1e-15);
    EXPECT_FALSE(r.has_scaled());
  }
}

TEST(BiasSweep, ConstantIsDegenerate) {
  const std::vector<double> hs{0.2, 0.1};
  const auto res = run_bias_sweep(kSphere, TestFunction::constant(kSphere, 1.0),
                                  kSphere.at(0.0, 0.0), hs);
  EXPECT_TRUE(res.fit.degenerate);
  for (const auto &r : res.records)
    EXPECT_EQ(r.error, 0.0);
}

TEST(BiasSweep, InputValidation) {
  const auto f = TestFunction::parse(kCircle, "cos");
  const std::vector<double> up{0.1, 0.2}, bad{0.1, -0.05}, none;
  EXPECT_EQ(kind_of([&] { run_bias_sweep(kCircle, f, kCircle.at(0.0), up); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { run_bias_sweep(kCircle, f, kCircle.at(0.0), bad); }),
            ErrorKind::NonpositiveBandwidth);
  EXPECT_EQ(kind_of([&] { run_bias_sweep(kCircle, f, kCircle.at(0.0), none); }),
            ErrorKind::EmptyInput);
}

// ------------------------------------------------------------------ CLT

TEST(Clt, RegimeAndReplicationChecks) {
  const auto f = TestFunction::parse(kCircle, "sin");
  EXPECT_EQ(kind_of([&] {
              run_pointwise_clt(kCircle, f, kCircle.at(0.0), 1000, BandwidthSchedule(1.0, 0.1),
                                200, 1);
            }),
            ErrorKind::RegimeError);
  EXPECT_EQ(kind_of([&] {
              run_pointwise_clt(kCircle, f, kCircle.at(0.0), 1000, BandwidthSchedule(1.0, 0.2),
                                200, 1);
            }),
            ErrorKind::RegimeError);
  EXPECT_EQ(kind_of([&] {
              run_pointwise_clt(kCircle, f, kCircle.at(0.0), 1000,
                                BandwidthSchedule(1.0, 0.25), 99, 1);
            }),
            ErrorKind::InvalidArgument);
}

TEST(Clt, VarianceNearTheory) {
  const auto f = TestFunction::parse(kCircle, "sin");
  const auto rep = run_pointwise_clt(kCircle, f, kCircle.at(0.0), 4000,
                                     BandwidthSchedule(1.0, 0.25), 200, 7);
  EXPECT_EQ(rep.deviations.size(), 200u);
  EXPECT_EQ(rep.records.size(), 200u);
  EXPECT_FALSE(rep.degenerate);
  EXPECT_NEAR(rep.s2_theory, 0.0317468, 5e-7);
  // chi-square(199) / 199 lies in [0.7, 1.35] with overwhelming probability
  EXPECT_GT(rep.sample_variance / rep.s2_theory, 0.7);
  EXPECT_LT(rep.sample_variance / rep.s2_theory, 1.35);
  EXPECT_GT(rep.ks_p_value, 1e-4);
  EXPECT_EQ(rep.records[3].seed, mix_seed(7, 3));
  EXPECT_NEAR(rep.records[3].scaled, rep.deviations[3], 0.0);
}

TEST(Clt, DeviationsMatchDirectComputation) {
  const auto f = TestFunction::parse(kCircle, "sin");
  const auto p = kCircle.at(0.5);
  const BandwidthSchedule sch(1.0, 0.25);
  const auto rep = run_pointwise_clt(kCircle, f, p, 500, sch, 100, 3);
  const double h = sch.at(500);
  for (std::size_t k : {0u, 42u, 99u}) {
    const Sample s = sample_uniform(kCircle, 500, mix_seed(3, k));
    const double est = graph_laplacian_at(p, s, f, Bandwidth(h));
    const double dev = std::sqrt(500 * std::pow(h, 3)) * (est - laplacian_target(f, p));
    EXPECT_NEAR(rep.deviations[k], dev, 1e-12 * (1.0 + std::abs(dev)));
  }
}

TEST(Clt, DegenerateCase) {
  const auto f = TestFunction::parse(kCircle, "cos");
  const auto rep = run_pointwise_clt(kCircle, f, kCircle.at(0.0), 4000,
                                     BandwidthSchedule(1.0, 0.25), 100, 5);
  EXPECT_TRUE(rep.degenerate);
  EXPECT_EQ(rep.s2_theory, 0.0);
  EXPECT_TRUE(std::isnan(rep.ks_p_value));
  EXPECT_LT(rep.max_abs_deviation, 0.1);
}

TEST(Clt, WorkersDoNotChangeResults) {
  const auto f = TestFunction::parse(kSphere, "x");
  const auto p = kSphere.at(0.0, 1.0);
  const BandwidthSchedule sch(1.0, 0.2);
  const auto a = run_pointwise_clt(kSphere, f, p, 800, sch, 100, 11, 1);
  const auto b = run_pointwise_clt(kSphere, f, p, 800, sch, 100, 11, 4);
  ASSERT_EQ(a.deviations.size(), b.deviations.size());
  for (std::size_t k = 0; k < a.deviations.size(); ++k)
    EXPECT_EQ(a.deviations[k], b.deviations[k]);
  EXPECT_EQ(a.ks_statistic, b.ks_statistic);
}

// ------------------------------------------------------ uniform sweeps

TEST(UniformSweep, MatchesBruteForceSup) {
  const auto fs = TestFunction::default_class(kCircle);
  const auto grid = parameter_grid(kCircle, 16);
  const std::vector<std::uint64_t> ns{500, 2000};
  const BandwidthSchedule sch(1.0, 0.25);
  const auto res = run_uniform_sweep(kCircle, fs, grid, ns, sch, 9);
  ASSERT_EQ(res.rows.size(), 2u);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double h = sch.at(ns[i]);
    const Sample s = sample_uniform(kCircle, ns[i], 9);
    double sup = 0.0;
    for (const auto &f : fs)
      for (const auto &q : grid)
        sup = std::max(sup, std::abs(graph_laplacian_at(q, s, f, Bandwidth(h)) -
                                     laplacian_target(f, q)));
    EXPECT_NEAR(res.rows[i].sup.sup_error, sup, 1e-13 * sup);
    EXPECT_NEAR(res.rows[i].scaled,
                sup * std::sqrt(ns[i] * std::pow(h, 3) / std::log(1.0 / h)), 1e-12);
    EXPECT_EQ(res.records[i].experiment, "uniform-sweep");
    EXPECT_EQ(res.records[i].seed, 9u);
    EXPECT_EQ(res.records[i].n, ns[i]);
  }
}

TEST(UniformSweep, ConstantsGiveZero) {
  const std::vector fs{TestFunction::constant(kSphere, 2.0)};
  const auto grid = parameter_grid(kSphere, 4);
  const std::vector<std::uint64_t> ns{200, 400};
  const auto res = run_uniform_sweep(kSphere, fs, grid, ns, BandwidthSchedule(1.0, 0.2), 1);
  for (const auto &r : res.rows)
    EXPECT_EQ(r.sup.sup_error, 0.0);
  EXPECT_FALSE(res.strictly_decreasing());
  EXPECT_TRUE(std::isnan(res.scaled_spread()));
}

TEST(UniformSweep, InputValidation) {
  const auto fs = TestFunction::default_class(kCircle);
  const auto grid = parameter_grid(kCircle, 8);
  const std::vector<std::uint64_t> ns{100}, none;
  EXPECT_EQ(kind_of([&] {
              run_uniform_sweep(kCircle, fs, grid, ns, BandwidthSchedule(1.0, 0.4), 1);
            }),
            ErrorKind::RegimeError);
  EXPECT_EQ(kind_of([&] {
              run_uniform_sweep(kCircle, fs, grid, ns, BandwidthSchedule(10.0, 0.25), 1);
            }),
            ErrorKind::DomainError);
  EXPECT_EQ(kind_of([&] {
              run_uniform_sweep(kCircle, fs, grid, none, BandwidthSchedule(1.0, 0.25), 1);
            }),
            ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of([&] {
              run_uniform_sweep(kSphere, fs, parameter_grid(kSphere, 4), ns,
                                BandwidthSchedule(1.0, 0.2), 1);
            }),
            ErrorKind::ManifoldMismatch);
}

TEST(UniformSweep, WorkersDoNotChangeResults) {
  const auto fs = TestFunction::default_class(kSphere);
  const auto grid = parameter_grid(kSphere, 6);
  const std::vector<std::uint64_t> ns{300, 600};
  const BandwidthSchedule sch(1.0, 0.2);
  const auto a = run_uniform_sweep(kSphere, fs, grid, ns, sch, 5, 1);
  const auto b = run_uniform_sweep(kSphere, fs, grid, ns, sch, 5, 4);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    EXPECT_EQ(a.rows[i].sup.sup_error, b.rows[i].sup.sup_error);
    EXPECT_EQ(a.records[i].point, b.records[i].point);
    EXPECT_EQ(a.records[i].function, b.records[i].function);
  }
}

// ------------------------------------------------------------------ LoL

TEST(Lol, ScalingAndConstant) {
  const std::vector fs{TestFunction::parse(kCircle, "sin"), TestFunction::parse(kCircle, "cos")};
  const auto grid = parameter_grid(kCircle, 32);
  const std::vector<std::uint64_t> ns{1000};
  const BandwidthSchedule sch(1.0, 0.25);
  const auto rep = run_law_of_logarithm(kCircle, fs, grid, ns, sch, 2);
  EXPECT_NEAR(rep.constant, 0.178176, 1e-6);
  ASSERT_EQ(rep.rows.size(), 1u);
  const double h = sch.at(1000);
  EXPECT_NEAR(rep.rows[0].scaled,
              std::sqrt(1000 * std::pow(h, 3) / (2 * std::log(1.0 / h))) *
                  rep.rows[0].sup.sup_error,
              1e-12);
  EXPECT_NEAR(rep.rows[0].ratio, rep.rows[0].scaled / rep.constant, 1e-12);
  EXPECT_EQ(rep.records[0].experiment, "lol");
}

TEST(Lol, ConstantFunctionsAreDegenerate) {
  const std::vector fs{TestFunction::constant(kCircle, 1.0)};
  const auto grid = parameter_grid(kCircle, 8);
  const std::vector<std::uint64_t> ns{100, 200};
  const auto rep = run_law_of_logarithm(kCircle, fs, grid, ns, BandwidthSchedule(1.0, 0.25), 1);
  EXPECT_TRUE(rep.degenerate);
  for (const auto &r : rep.rows) {
    EXPECT_EQ(r.sup.sup_error, 0.0);
    EXPECT_TRUE(std::isnan(r.ratio));
  }
}

// --------------------------------------------------------------- labels

TEST(Labels, PointLabels) {
  EXPECT_EQ(point_label(kCircle, kCircle.at(0.0)), "theta=0");
  EXPECT_EQ(point_label(kSphere, kSphere.at(0.0, 0.0)), "azimuth=0,polar=0");
  const auto t = EmbeddedManifold::torus(2.0, 0.5);
  EXPECT_EQ(point_label(t, t.at(0.0, 0.5)), "u=0,v=0.5");
}
