#include <gtest/gtest.h>

#include <cmath>

#include "elfs/edge_space.hpp"
#include "elfs/electric.hpp"
#include "elfs/errors.hpp"
#include "elfs/resistance.hpp"
#include "elfs/walk.hpp"
#include "test_graphs.hpp"

namespace elfs {
namespace {

constexpr double kPi = 3.14159265358979323846;

double rd(const Graph& g) { return solve_electric(g).resistance * g.degree(g.source()); }

// Ideal controlled-power state from the 2x2 rotation, independent of the composition.
CMat ideal_power_state(const Graph& g, long range) {
  const EdgeSpace es(g);
  const CVec phi = es.star_state(g.source());
  const CVec f = es.flow_state(solve_electric(g));
  const int d = es.dim();
  const CMat r = (CMat::Identity(d, d) - 2.0 * phi * phi.adjoint()) * (2.0 * f * f.adjoint() - CMat::Identity(d, d));
  CMat out(d, range);
  CVec v = phi;
  for (long t = 0; t < range; ++t) {
    out.col(t) = v / std::sqrt(double(range));
    v = r * v;
  }
  return out;
}

TEST(RotationModel, EigenphasesOnFixturesAndRandomGraphs) {
  std::vector<Graph> graphs = testing::named_fixtures();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    graphs.push_back(testing::random_connected_graph(5 + seed % 12, 300 + seed, 1 + seed % 2));
  }
  for (const Graph& g : graphs) {
    const RotationModel m = rotation_model(g);
    EXPECT_LT(m.phase_error, 1e-10);
    EXPECT_NEAR(m.sin_theta, 1.0 / std::sqrt(2.0 * rd(g)), 1e-10);
  }
}

TEST(PowerState, SingleEdgeTwoSlices) {
  const Graph g = fixtures::single_edge();
  const PowerState ps = controlled_power_state(g, 2);
  EXPECT_LT((ps.slices - ideal_power_state(g, 2)).norm(), 1e-12);
  EXPECT_NEAR(rotation_model(g).theta, kPi / 4, 1e-12);
}

TEST(PowerState, RangeOneIsStartState) {
  const Graph g = fixtures::path3();
  const PowerState ps = controlled_power_state(g, 1);
  EXPECT_LT((ps.slices.col(0) - EdgeSpace(g).star_state(0)).norm(), 1e-15);
  EXPECT_EQ(ps.complexity, 0.0);
}

TEST(PowerState, MatchesIdealAndComplexityBound) {
  for (const Graph& g : testing::named_fixtures()) {
    const WalkStats ws = walk_quantities(g);
    for (long t : {3L, 8L, 17L}) {
      const PowerState ps = controlled_power_state(g, t);
      EXPECT_LT((ps.slices - ideal_power_state(g, t)).norm(), 1e-10);
      EXPECT_LE(ps.complexity, ws.escape_time / rd(g) * double(t) + 1e-9);
      EXPECT_LT(ps.residual, 1e-9);
      EXPECT_LE(ps.degraded_distance, 0.1 + 1e-12);
    }
  }
}

TEST(PowerState, RejectsOversizedCounter) {
  EXPECT_THROW(controlled_power_state(fixtures::path3(), kMaxCounterRange + 1), ValidationError);
  EXPECT_THROW(controlled_power_state(fixtures::path3(), 0), ValidationError);
}

TEST(Qpe, PathSixReadsExactPhase) {
  const auto dist = qpe_distribution(controlled_power_state(fixtures::path3(), 6).slices);
  EXPECT_NEAR(dist[1] + dist[5], 1.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const EstimateRecord r = qpe_estimate(fixtures::path3(), 1.5, 6, seed);
    EXPECT_NEAR(r.estimate, 0.5, 1e-12);
  }
}

TEST(Qpe, SingleEdgeQuarterPhase) {
  const auto dist = qpe_distribution(controlled_power_state(fixtures::single_edge(), 4).slices);
  EXPECT_NEAR(dist[1] + dist[3], 1.0, 1e-12);
  EXPECT_NEAR(counter_to_theta(1, 4), kPi / 4, 1e-15);
}

TEST(Qpe, LowerBoundFixtureTailBound) {
  const Graph g = fixtures::lower_bound(0.1);
  QpeCache cache;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const EstimateRecord r = qpe_estimate(g, 2.0, 64, seed, {}, &cache);
    EXPECT_NEAR(r.exact, 1.0 / std::sqrt(5.0), 1e-12);
    ok += r.success;
  }
  EXPECT_GE(ok, 667);
}

TEST(Qpe, DegradedModeStillConcentrates) {
  const Graph g = fixtures::lower_bound(0.1);
  QpeCache cache;
  QpeOptions opts;
  opts.mode = QpeMode::degraded;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) ok += qpe_estimate(g, 2.0, 64, seed, opts, &cache).success;
  EXPECT_GE(ok, 200);
}

TEST(Qpe, MedianOfMeansChargesEveryReadout) {
  QpeOptions opts;
  opts.median_groups = 15;
  const EstimateRecord r = qpe_estimate(fixtures::path3(), 1.5, 6, 1, opts);
  EXPECT_NEAR(r.estimate, 0.5, 1e-12);
  EXPECT_EQ(r.walk_steps, 15 * 9);
}

struct KnownCase {
  Graph g;
  double et_bar, p, eps;
};

TEST(EstimateKnown, DocumentedExamples) {
  const std::vector<KnownCase> cases = {
      {fixtures::path3(), 3.0, 1.0, 0.1},
      {fixtures::single_edge(), 1.0, 1.0, 0.25},
      {fixtures::lower_bound(0.1), walk_quantities(fixtures::lower_bound(0.1)).escape_time, 1.25, 0.05}};
  for (const KnownCase& c : cases) {
    QpeCache cache;
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      ok += estimate_known(c.g, c.et_bar, c.p, c.eps, seed, &cache).success;
    }
    EXPECT_GE(ok, 134) << serialize_graph(c.g);
  }
}

TEST(EstimateKnown, SuccessRateAtTenPercentOnFixtures) {
  for (const Graph& g : testing::named_fixtures()) {
    const WalkStats ws = walk_quantities(g);
    for (double p : {rd(g), rd(g) / 2}) {
      QpeCache cache;
      int ok = 0;
      for (std::uint64_t seed = 0; seed < 500; ++seed) {
        ok += estimate_known(g, ws.escape_time, p, 0.1, seed, &cache).success;
      }
      EXPECT_GE(ok, 334) << serialize_graph(g) << " p=" << p;
    }
  }
}

TEST(EstimateKnown, BudgetScalesAsInverseEps) {
  for (const Graph& g : testing::named_fixtures()) {
    const double et = walk_quantities(g).escape_time;
    std::vector<double> xs, ys;
    for (double eps : {0.2, 0.1, 0.05}) {
      const EstimateRecord r = estimate_known(g, et, rd(g), eps, 0);
      xs.push_back(std::log(1 / eps));
      ys.push_back(std::log(double(r.walk_steps)));
      const double constant = r.walk_steps / (std::sqrt(et) / eps);
      RecordProperty("budget_constant", std::to_string(constant));
      EXPECT_LT(constant, 60.0);
    }
    const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    EXPECT_GE(num / den, 0.8);
    EXPECT_LE(num / den, 1.2);
  }
}

TEST(BinarySearch, SingleEdgeStopsImmediately) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EstimateRecord r = binary_search_estimate(fixtures::single_edge(), 1.0, seed);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_EQ(r.estimate, 1.0);
    EXPECT_TRUE(r.success);
  }
}

TEST(BinarySearch, GuaranteeFrequencyOnFixtures) {
  std::vector<Graph> graphs = testing::named_fixtures();
  graphs.push_back(fixtures::path(9));
  for (const Graph& g : graphs) {
    const double et = walk_quantities(g).escape_time;
    QpeCache cache;
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const EstimateRecord r = binary_search_estimate(g, et, seed, &cache);
      ok += r.success;
      EXPECT_LE(r.iterations, binary_search_iteration_cap(et));
    }
    EXPECT_GE(ok, 334) << serialize_graph(g);
  }
}

TEST(BinarySearch, PathNineIterations) {
  const Graph g = fixtures::path(9);
  const double et = walk_quantities(g).escape_time;
  QpeCache cache;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_LE(binary_search_estimate(g, et, seed, &cache).iterations, std::ceil(std::log2(et)));
  }
}

TEST(LowerBound, ClosedForms) {
  const LowerBoundRecord r = lower_bound_fixture(0.1);
  EXPECT_NEAR(r.rd_plus, 2.5, 1e-12);
  EXPECT_NEAR(r.rd_minus, 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(lower_bound_fixture(0.25).ratio, 3.0, 1e-12);
  EXPECT_NEAR(r.overlap_gap, 0.1, 1e-12);
  const LowerBoundRecord tiny = lower_bound_fixture(1e-9);
  EXPECT_LT(tiny.angle_gap, 1e-8);
  EXPECT_NEAR(tiny.flow_overlap, 1.0, 1e-8);
  EXPECT_THROW(lower_bound_fixture(0.5), ValidationError);
}

TEST(WitnessSize, PathFixture) {
  const Graph g = fixtures::path3();
  const EdgeSpace es(g);
  const EstimateRecord r =
      witness_size_estimate(es.star_projector(), es.sym_projector(), es.star_state(0), 1.5, 6, 3);
  EXPECT_NEAR(r.exact, 4.0, 1e-10);
  EXPECT_NEAR(r.estimate, 4.0, 1e-10);
}

TEST(WitnessSize, ZeroPiUsesKernelOfDelta) {
  const int d = 4;
  CMat a = CMat::Zero(d, d);
  a(0, 0) = 1;
  a(1, 1) = 1;
  a(0, 1) = a(1, 0) = 0.3;
  const CMat delta = projector_onto(a.leftCols(2));
  CVec psi(d);
  psi << 0.5, 0.5, 0.5, 0.5;
  // Dense oracle: omega = 1 / ||P_{ker Delta} psi||^2 from an SVD kernel.
  const CMat k = kernel_basis(delta);
  const double omega = 1.0 / (k.adjoint() * psi).squaredNorm();
  const EstimateRecord r = witness_size_estimate(CMat::Zero(d, d), delta, psi, 2.0, 128, 9);
  EXPECT_NEAR(r.exact, omega, 1e-9);
  EXPECT_NEAR(1 / std::sqrt(r.estimate), 1 / std::sqrt(omega), 2 * kPi / 128);
}

TEST(WitnessSize, RejectsInputOutsideKernel) {
  const EdgeSpace es(fixtures::path3());
  EXPECT_THROW(witness_size_estimate(es.star_projector(), es.sym_projector(), es.star_state(1), 1, 8, 0),
               ValidationError);
}

TEST(EstimateJson, Fields) {
  const auto j = to_json(qpe_estimate(fixtures::path3(), 1.5, 6, 0));
  EXPECT_EQ(j["T"].get<long>(), 6);
  EXPECT_TRUE(j["success"].get<bool>());
}

}  // namespace
}  // namespace elfs
