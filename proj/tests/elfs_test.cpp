#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "elfs/edge_space.hpp"
#include "elfs/electric.hpp"
#include "elfs/elfs.hpp"
#include "elfs/errors.hpp"
#include "elfs/walk.hpp"
#include "test_graphs.hpp"

namespace elfs {
namespace {

double rd(const Graph& g) { return solve_electric(g).resistance * g.degree(g.source()); }

// Path 0-1-2-3 with s = 1 and M = {0, 3}.
Graph fix_d() { return fixtures::path4_middle(); }

std::vector<Graph> chain_graphs() {
  std::vector<Graph> gs = testing::named_fixtures();
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    gs.push_back(testing::random_connected_graph(6 + int(seed % 35), 900 + seed, 1 + int(seed % 3)));
  }
  return gs;
}

// Schedule applied with explicit 2x2 matrices.
double matrix_oracle_overlap_sq(const AngleSchedule& s, double lam) {
  const Eigen::Vector2cd target(1.0, 0.0);
  const Eigen::Vector2cd start(std::sqrt(lam), std::sqrt(1.0 - lam));
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Vector2cd v = start;
  for (int l = 0; l < s.pairs(); ++l) {
    const Eigen::Matrix2cd sf = id - (1.0 - std::polar(1.0, s.target_phase[l])) * target * target.adjoint();
    const Eigen::Matrix2cd ss = id - (1.0 - std::polar(1.0, -s.start_phase[l])) * start * start.adjoint();
    v = ss * sf * v;
  }
  return std::norm(target.dot(v));
}

// EHT from per-vertex step distributions, each computed by its own electric solve.
std::vector<double> eht_oracle(const Graph& g) {
  std::vector<int> t;
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (!g.is_sink(x)) t.push_back(x);
  }
  const int k = int(t.size());
  RMat a = RMat::Identity(k, k);
  for (int i = 0; i < k; ++i) {
    const auto q = elfs_step_distribution(g, t[i]);
    for (int j = 0; j < k; ++j) a(i, j) -= q[t[j]];
  }
  const RVec h = a.partialPivLu().solve(RVec::Ones(k));
  std::vector<double> out(g.num_vertices(), 0.0);
  for (int i = 0; i < k; ++i) out[t[i]] = h(i);
  return out;
}

// ---------------------------------------------------------------------------

TEST(FixedPointAngles, AlreadyOnTarget) {
  const AngleSchedule s = fixed_point_angles(1.0, 1e-3);
  EXPECT_EQ(s.length, 1);
  EXPECT_EQ(s.pairs(), 0);
  EXPECT_DOUBLE_EQ(schedule_overlap_sq(s, 1.0), 1.0);
}

TEST(FixedPointAngles, QuarterOverlapSweep) {
  const AngleSchedule s = fixed_point_angles(0.25, 1e-3);
  EXPECT_LE(s.length, 40);
  for (int i = 0; i < 100; ++i) {
    const double lam = 0.25 + 0.75 * i / 99.0;
    const double got = matrix_oracle_overlap_sq(s, lam);
    EXPECT_GE(got, 1.0 - 1e-6 - 1e-12) << lam;
    EXPECT_NEAR(got, schedule_overlap_sq(s, lam), 1e-12);
  }
}

TEST(FixedPointAngles, LengthWithinConstantOfSearchBound) {
  const AngleSchedule s = fixed_point_angles(0.01, 1e-2);
  EXPECT_LE(s.length / (10.0 * std::log(100.0)), 3.0);
  EXPECT_EQ(s.length % 2, 1);
}

TEST(FixedPointAngles, BelowWindowIsNotPromised) {
  // Outside the covered overlaps the schedule may undershoot; the sweep only covers [w, 1].
  const AngleSchedule s = fixed_point_angles(0.2, 1e-4);
  EXPECT_LT(matrix_oracle_overlap_sq(s, 0.002), 1.0 - 1e-8);
  EXPECT_THROW(fixed_point_angles(0.0, 0.1), ValidationError);
  EXPECT_THROW(fixed_point_angles(0.5, 1.0), ValidationError);
}

TEST(FixedPointPrepare, SingleEdgeHighPrecision) {
  const Graph g = fixtures::single_edge();
  const FixedPointResult r = fixed_point_prepare(g, 1.0, 1e-6);
  EXPECT_GE(r.overlap, 1.0 - 1e-6);
  EXPECT_LT(r.residual, 1e-9);
  // Overlap 1/sqrt2 to start with.
  EXPECT_NEAR(std::abs(EdgeSpace(g).star_state(0).dot(r.target)), std::sqrt(0.5), 1e-12);
}

TEST(FixedPointPrepare, PathHalfBound) {
  const FixedPointResult r = fixed_point_prepare(fixtures::path3(), 0.5, 1e-4);
  EXPECT_GE(r.overlap * r.overlap, 1.0 - 1e-7);
}

TEST(FixedPointPrepare, EpsilonSweepOverlapAndLength) {
  for (const Graph& g : {fixtures::single_edge(), fixtures::path3()}) {
    const double pbar = 1.0 / rd(g);
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const FixedPointResult r = fixed_point_prepare(g, pbar, eps);
      EXPECT_GE(r.overlap, 1.0 - eps);
      const double ref = std::log(1.0 / eps) / std::sqrt(pbar);
      EXPECT_LE(r.schedule.length, 3.0 * ref);
      EXPECT_GE(r.schedule.length, ref / 3.0);
      // Each rotation costs at most ET/(Rd) - 1 plus the counter term.
      EXPECT_LE(r.complexity, 2.0 * r.bound);
      EXPECT_NEAR(r.complexity, r.formula_complexity, 1e-9);
    }
  }
}

TEST(FixedPointPrepare, ModifiedGraphScalesWithSqrtEscapeTime) {
  const Graph g = fixtures::path3();
  const WalkStats ws = walk_quantities(g);
  const ModifiedGraph mg = attach_source_stub(g, ws.escape_time / rd(g));
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const FixedPointResult r = fixed_point_prepare(mg.graph, 1.0 / (1.0 + ws.escape_time), eps);
    const double c = r.complexity / (std::sqrt(ws.escape_time) * std::log(1.0 / eps));
    RecordProperty("constant_eps_" + std::to_string(int(-std::log10(eps))), std::to_string(c));
    EXPECT_LE(c, 8.0);
    EXPECT_GE(r.overlap, 1.0 - eps);
  }
}

TEST(FixedPointPrepare, RejectsOptimisticBound) {
  EXPECT_THROW(fixed_point_prepare(fixtures::path3(), 0.6, 1e-2), ValidationError);
}

TEST(ModifiedFlowOverlap, ClosedForms) {
  EXPECT_NEAR(modified_flow_overlap(fixtures::single_edge(), 1.0).overlap_sq, 0.5, 1e-12);
  EXPECT_NEAR(modified_flow_overlap(fixtures::path3(), 2.0).overlap_sq, 0.8, 1e-12);
}

TEST(ModifiedFlowOverlap, IncreasesWithEta) {
  for (const Graph& g : testing::named_fixtures()) {
    double prev = 0.0;
    for (double eta = 1.0; eta <= 1024.0; eta *= 2.0) {
      const FlowOverlap o = modified_flow_overlap(g, eta);
      EXPECT_GT(o.overlap_sq, prev);
      EXPECT_NEAR(o.overlap_sq, 1.0 / (1.0 + 1.0 / (eta * rd(g))), 1e-10);
      prev = o.overlap_sq;
    }
  }
}

TEST(ExactElf, SingleEdgeAmplitudeHalf) {
  ExactElfOptions o;
  o.eta = 1.0;
  o.aa.runs = 2000;
  const ExactElfResult r = exact_elf_prepare(fixtures::single_edge(), 1, o);
  EXPECT_NEAR(r.alpha, 0.5, 1e-12);
  EXPECT_GE(r.fidelity, 1.0 - 1e-9);
  EXPECT_EQ(r.aa.las_vegas.failures, 0);
  // The reduced output is the modified flow state.
  const CMat ideal = r.target * r.target.adjoint();
  EXPECT_LT((r.output_state - ideal).norm(), 1e-9);
}

TEST(ExactElf, PathAmplitude) {
  ExactElfOptions o;
  o.eta = 2.0;
  o.aa.runs = 2000;
  const ExactElfResult r = exact_elf_prepare(fixtures::path3(), 2, o);
  EXPECT_NEAR(r.alpha, 1.0 / std::sqrt(10.0), 1e-12);
  EXPECT_GE(r.aa.las_vegas.min_fidelity, 1.0 - 1e-9);
}

TEST(ExactElf, DefaultStubFromEstimates) {
  const Graph g = fixtures::path3();
  const ExactElfResult r = exact_elf_prepare(g, 3);
  EXPECT_NEAR(r.eta, walk_quantities(g).escape_time / rd(g), 1e-12);
  EXPECT_GE(r.fidelity, 1.0 - 1e-9);
  EXPECT_LE(r.ratio, 8.0);
}

TEST(ExactElf, EverySeedExact) {
  ExactElfOptions o;
  o.eta = 3.5;
  o.aa.runs = 3000;
  for (std::uint64_t seed : {1u, 17u, 99u}) {
    const ExactElfResult r = exact_elf_prepare(fixtures::path3(), seed, o);
    EXPECT_EQ(r.aa.las_vegas.failures, 0);
    EXPECT_GE(r.aa.las_vegas.min_fidelity, 1.0 - 1e-9);
  }
}

TEST(ExactElf, UnmodifiedPreparesOriginalFlow) {
  ExactElfOptions o;
  o.modified = false;
  o.aa.runs = 500;
  const Graph g = fixtures::lower_bound(0.1);
  const ExactElfResult r = exact_elf_prepare(g, 4, o);
  EXPECT_NEAR(r.alpha, 1.0 / std::sqrt(2.0 * 2.5), 1e-12);
  EXPECT_EQ(r.graph.num_vertices(), g.num_vertices());
}

// ---------------------------------------------------------------------------

TEST(StepDistribution, Fixtures) {
  const auto a = elfs_step_distribution(fixtures::single_edge(), 0);
  EXPECT_NEAR(a[0], 0.5, 1e-12);
  EXPECT_NEAR(a[1], 0.5, 1e-12);
  const auto b = elfs_step_distribution(fixtures::path3(), 0);
  EXPECT_NEAR(b[0], 0.25, 1e-12);
  EXPECT_NEAR(b[1], 0.5, 1e-12);
  EXPECT_NEAR(b[2], 0.25, 1e-12);
  // Flow 2/3 toward 0 and 1/3 along 1-2-3, R = 2/3.
  const auto d = elfs_step_distribution(fix_d(), 1);
  EXPECT_NEAR(d[0], 1.0 / 3, 1e-12);
  EXPECT_NEAR(d[1], 5.0 / 12, 1e-12);
  EXPECT_NEAR(d[2], 1.0 / 6, 1e-12);
  EXPECT_NEAR(d[3], 1.0 / 12, 1e-12);
}

TEST(StepDistribution, RejectsSink) {
  EXPECT_THROW(elfs_step_distribution(fixtures::path3(), 2), ValidationError);
}

TEST(StepDistribution, StubAddsSelfLoopOnly) {
  const Graph g = fix_d();
  const double eta = 3.0;
  const auto plain = elfs_step_distribution(g, 1);
  const auto stub = elfs_step_distribution(g, 1, eta);
  const double loop = 1.0 / (1.0 + eta * rd(g));
  for (int y = 0; y < 4; ++y) {
    EXPECT_NEAR(stub[y], (1.0 - loop) * plain[y] + (y == 1 ? loop : 0.0), 1e-12);
  }
}

TEST(ElfsChain, SingleEdgeGeometric) {
  const ElfsChain c = elfs_chain(fixtures::single_edge());
  EXPECT_NEAR(c.eht(0), 2.0, 1e-12);
}

TEST(ElfsChain, ArrivalEqualsHarmonicMeasure) {
  for (const Graph& g : chain_graphs()) {
    const ElfsChain c = elfs_chain(g);
    EXPECT_LT(c.row_sum_defect, 1e-12);
    EXPECT_LT(c.spectral_radius_bound, 1.0);
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (g.is_sink(x)) continue;
      const ArrivalDistribution h = harmonic_measure(g.with_source(x));
      for (std::size_t j = 0; j < h.sinks.size(); ++j) EXPECT_NEAR(c.arrival(x, j), h.prob[j], 1e-8);
    }
  }
}

TEST(ElfsChain, EhtMatchesPerVertexSolves) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = testing::random_connected_graph(8 + int(seed), 40 + seed, 2);
    const ElfsChain c = elfs_chain(g);
    const auto oracle = eht_oracle(g);
    for (int x = 0; x < g.num_vertices(); ++x) EXPECT_NEAR(c.eht(x), oracle[x], 1e-9);
  }
}

TEST(ElfsChain, ModifiedKeepsArrival) {
  for (const Graph& g : testing::named_fixtures()) {
    ElfsChainOptions o;
    o.modified = true;
    const ElfsChain plain = elfs_chain(g), mod = elfs_chain(g, o);
    EXPECT_LT((plain.arrival - mod.arrival).cwiseAbs().maxCoeff(), 1e-10);
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (g.is_sink(x)) continue;
      EXPECT_LE(mod.self_loop(x), 0.5 + 1e-12);
      EXPECT_GE(mod.eht(x), plain.eht(x) - 1e-12);
      EXPECT_LE(mod.eht(x), 2.0 * plain.eht(x) + 1e-12);
    }
  }
}

TEST(ElfsChain, EscapeTimeIdentity) {
  for (const Graph& g : chain_graphs()) {
    const ElfsChain c = elfs_chain(g);
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (g.is_sink(x)) continue;
      double lhs = 0.0;
      for (int y = 0; y < g.num_vertices(); ++y) {
        if (!g.is_sink(y) && c.visits(x, y) != 0.0) {
          lhs += c.visits(x, y) * walk_quantities(g.with_source(y)).escape_time;
        }
      }
      const double ht = walk_quantities(g.with_source(x)).hitting_time;
      EXPECT_NEAR(lhs, 2.0 * ht, 1e-8 * std::max(1.0, ht));
    }
    if (g.num_vertices() > 12) break;  // the per-vertex oracle is cubic per source
  }
}

TEST(ElfsChain, PathSeparation) {
  const Graph g = fixtures::path(64);
  const ElfsChain c = elfs_chain(g);
  EXPECT_NEAR(c.hitting_time(0), 63.0 * 63.0, 1e-6);
  EXPECT_LE(c.eht(0), 6.0 * std::log(64.0));
  RecordProperty("eht_over_log_n", std::to_string(c.eht(0) / std::log(64.0)));
}

TEST(ElfsChain, PathVisitTotals) {
  const ElfsChain c = elfs_chain(fixtures::path3());
  double sum = 0.0;
  for (int y = 0; y < 3; ++y) sum += c.visits(0, y) * c.escape_time(y);
  EXPECT_NEAR(sum, 8.0, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(SimulateElfs, IndependentTraceShape) {
  const Graph g = fix_d();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ElfsTrace t = simulate_elfs(g, seed);
    ASSERT_EQ(t.sources.front(), 1);
    EXPECT_EQ(long(t.sources.size()), t.rho + 1);
    EXPECT_EQ(long(t.arcs.size()), t.rho);
    for (long i = 0; i < t.rho; ++i) EXPECT_FALSE(g.is_sink(t.sources[i]));
    EXPECT_TRUE(g.is_sink(t.sources.back()));
  }
}

TEST(SimulateElfs, CoupledTraceIsAWalk) {
  const Graph g = testing::random_connected_graph(12, 77, 2);
  ElfsOptions o;
  o.coupled = true;
  const ElfsSampler sampler(g);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const ElfsTrace t = simulate_elfs(sampler, seed, o);
    ASSERT_EQ(long(t.nu.size()), t.rho);
    for (std::size_t k = 1; k < t.walk.size(); ++k) {
      EXPECT_GT(g.weight(t.walk[k - 1], t.walk[k]), 0.0);
    }
    for (long i = 1; i <= t.rho; ++i) {
      EXPECT_EQ(t.walk[t.nu[i - 1]], t.sources[i]);
      if (i > 1) EXPECT_LE(t.nu[i - 2], t.nu[i - 1]);
    }
    // nu_rho is the first hitting time of M.
    for (long k = 0; k + 1 < long(t.walk.size()); ++k) EXPECT_FALSE(g.is_sink(t.walk[k]));
    EXPECT_EQ(t.nu.back(), long(t.walk.size()) - 1);
  }
}

TEST(SimulateElfs, ArrivalFrequenciesMatchChain) {
  for (const Graph& g : {fix_d(), testing::random_connected_graph(15, 5, 3)}) {
    const ElfsChain c = elfs_chain(g);
    const ElfsSampler sampler(g);
    for (bool coupled : {false, true}) {
      ElfsOptions o;
      o.coupled = coupled;
      o.record_walk = false;
      const int runs = 100000;
      std::map<int, int> counts;
      for (int i = 0; i < runs; ++i) ++counts[simulate_elfs(sampler, split_seed(31, i), o).sources.back()];
      for (std::size_t j = 0; j < c.sinks.size(); ++j) {
        const double p = c.arrival(g.source(), j);
        const double se = std::sqrt(p * (1 - p) / runs);
        EXPECT_NEAR(counts[c.sinks[j]] / double(runs), p, 4 * se + 1e-12) << coupled;
      }
    }
  }
}

TEST(SimulateElfs, CoupledFirstStepHasElfsLaw) {
  const Graph g = fix_d();
  const auto q = elfs_step_distribution(g, 1);
  ElfsOptions o;
  o.coupled = true;
  o.record_walk = false;
  const ElfsSampler sampler(g);
  const int runs = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < runs; ++i) ++counts[simulate_elfs(sampler, split_seed(8, i), o).sources[1]];
  for (int y = 0; y < 4; ++y) {
    EXPECT_NEAR(counts[y] / double(runs), q[y], 4 * std::sqrt(q[y] * (1 - q[y]) / runs));
  }
}

TEST(SimulateElfs, StopPotentialNonnegativeOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = testing::random_connected_graph(6 + int(seed % 30), 500 + seed, 1 + int(seed % 3));
    const ElfsSampler sampler(g);
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (g.is_sink(x)) continue;
      // Mean walk steps per elfs step: HT_x - E[HT_Y].
      const auto& q = sampler.step_distribution(x);
      double expected = walk_quantities(g.with_source(x)).hitting_time;
      for (int y = 0; y < g.num_vertices(); ++y) {
        if (!g.is_sink(y) && q[y] > 0) expected -= q[y] * walk_quantities(g.with_source(y)).hitting_time;
      }
      EXPECT_NEAR(sampler.coupled_mean_steps(x), expected, 1e-8);
      EXPECT_NEAR(sampler.coupled_mean_steps(x), walk_quantities(g.with_source(x)).escape_time / 2.0, 1e-8);
    }
    if (g.num_vertices() > 15) break;
  }
}

TEST(CouplingIdentities, Fixtures) {
  const std::vector<std::pair<Graph, double>> cases = {
      {fixtures::single_edge(), 2.0}, {fixtures::path3(), 8.0}, {fix_d(), 4.0}};
  for (const auto& [g, expected] : cases) {
    const CouplingReport r = coupling_identities(g, 100000, 21);
    EXPECT_NEAR(r.sum_et, expected, 1e-8);
    EXPECT_TRUE(r.exact_ok);
    EXPECT_TRUE(r.monte_carlo_ok) << r.nu1_z;
    EXPECT_NEAR(r.tau_mean, expected / 2.0, 4 * r.tau_se + 1e-12);
  }
}

TEST(CouplingIdentities, RejectsTinySample) {
  EXPECT_THROW(coupling_identities(fix_d(), 1, 0), ValidationError);
}

// ---------------------------------------------------------------------------

TEST(QuantumElfs, SingleEdgeDepthTwo) {
  QuantumElfsOptions o;
  o.modified = false;
  o.depth_cap = 2;
  const QuantumElfsResult r = quantum_elfs_process(fixtures::single_edge(), o);
  std::map<std::vector<int>, double> got;
  for (const ElfsPath& p : r.paths) got[p.vertices] = p.probability;
  EXPECT_NEAR(got[(std::vector<int>{0, 1})], 0.5, 1e-9);
  EXPECT_NEAR(got[(std::vector<int>{0, 0, 1})], 0.25, 1e-9);
  EXPECT_NEAR(got[(std::vector<int>{0, 0, 0})], 0.25, 1e-9);
  EXPECT_NEAR(r.remaining_mass, 0.25, 1e-9);
}

TEST(QuantumElfs, RegisterDiagonalMatchesChain) {
  for (const Graph& g : {fixtures::path3(), fix_d(), fixtures::lower_bound(0.1)}) {
    QuantumElfsOptions o;
    o.depth_cap = 3;
    const QuantumElfsResult r = quantum_elfs_process(g, o);
    EXPECT_LT(r.chain_deviation, 1e-8);
    double total = r.remaining_mass;
    for (double a : r.arrival) total += a;
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_GE(r.min_fidelity, 1.0 - 1e-9);
    // Complexity tracks E[sum sqrt(ET)] up to a constant.
    EXPECT_GT(r.ratio, 0.5);
    EXPECT_LT(r.ratio, 20.0);
  }
}

TEST(QuantumElfs, ArrivalWithinTruncationMass) {
  const Graph g = fix_d();
  QuantumElfsOptions o;
  o.depth_cap = 3;
  const QuantumElfsResult r = quantum_elfs_process(g, o);
  const ArrivalDistribution h = harmonic_measure(g);
  for (std::size_t j = 0; j < h.sinks.size(); ++j) {
    EXPECT_LE(r.arrival[j], h.prob[j] + 1e-9);
    EXPECT_GE(r.arrival[j], h.prob[j] - r.remaining_mass - 1e-9);
  }
}

TEST(QuantumElfs, DepthOneIsOnePreparation) {
  const Graph g = fixtures::path3();
  QuantumElfsOptions o;
  o.depth_cap = 1;
  const QuantumElfsResult r = quantum_elfs_process(g, o);
  ExactElfOptions eo;
  eo.aa = o.aa;
  const ExactElfResult single = exact_elf_prepare(g, split_seed(o.seed, 0), eo);
  EXPECT_NEAR(r.complexity, single.complexity, 1e-9);
  EXPECT_EQ(r.paths.size(), 3u);
}

TEST(QuantumElfs, EstimatedParametersStayClose) {
  const Graph g = fix_d();
  QuantumElfsOptions o;
  o.depth_cap = 3;
  const QuantumElfsResult exact = quantum_elfs_process(g, o);
  o.mode = ElfsParameterMode::estimated;
  const QuantumElfsResult est = quantum_elfs_process(g, o);
  EXPECT_LT(est.chain_deviation, 1e-8);
  std::map<std::vector<int>, double> a, b;
  for (const ElfsPath& p : exact.paths) a[p.vertices] = p.probability;
  for (const ElfsPath& p : est.paths) b[p.vertices] = p.probability;
  double tv = 0.0;
  for (const auto& [k, v] : a) tv += std::abs(v - b[k]);
  for (const auto& [k, v] : b) {
    if (!a.count(k)) tv += v;
  }
  EXPECT_LT(tv / 2.0, 0.05);
}

TEST(QuantumElfs, DimensionGuard) {
  QuantumElfsOptions o;
  EXPECT_THROW(quantum_elfs_process(fixtures::cycle6(), o), ValidationError);
  o.depth_cap = 4;
  EXPECT_THROW(quantum_elfs_process(fixtures::path3(), o), ValidationError);
}

TEST(ElfsJson, ChainExport) {
  const Graph g = fix_d();
  const nlohmann::json j = to_json(elfs_chain(g), g);
  EXPECT_NEAR(j["sum_ET"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["arrival"]["1"]["0"].get<double>(), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(j["EHT"].contains("2"));
}

}  // namespace
}  // namespace elfs
