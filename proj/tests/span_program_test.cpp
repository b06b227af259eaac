#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "elfs/errors.hpp"
#include "elfs/resistance.hpp"
#include "elfs/span_program.hpp"

namespace elfs {
namespace {

using span_fixtures::or2;
using span_fixtures::two_target;

// Golden-section argmin of a convex function on [lo, hi], after a coarse grid.
double argmin_1d(const std::function<double(double)>& f, double lo, double hi) {
  double best = lo;
  for (int i = 0; i <= 2000; ++i) {
    const double t = lo + (hi - lo) * i / 2000.0;
    if (f(t) < f(best)) best = t;
  }
  double a = best - (hi - lo) / 2000.0, b = best + (hi - lo) / 2000.0;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return (a + b) / 2;
}

// Brute force over omega = (1/c, t) for the two-target program, where tau = (c, 0).
struct BruteNegative {
  double error, size;
};
BruteNegative brute_two_target(const std::vector<int>& x) {
  const SpanProgram p = two_target();
  const double w1 = 1.0 / p.target()(0).real();
  const bool e1 = x[0] == 1, e3 = x[0] == 0, e2 = x[1] == 1;
  // Components of A^dagger omega: (w1, t, w1 + t).
  auto err = [&](double t) { return (e1 ? w1 * w1 : 0) + (e2 ? t * t : 0) + (e3 ? (w1 + t) * (w1 + t) : 0); };
  auto size = [&](double t) { return w1 * w1 + t * t + (w1 + t) * (w1 + t); };
  // The error is a quadratic in t: either constant (every t minimizes) or strictly convex.
  if (err(-1.0) == err(0.0) && err(0.0) == err(1.0)) return {err(0.0), size(argmin_1d(size, -5, 5))};
  const double t = argmin_1d(err, -5, 5);
  return {err(t), size(t)};
}

TEST(SpanProgramModel, NormalizesTarget) {
  const SpanProgram p = or2();
  EXPECT_NEAR(p.w0().norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p.w0()(0)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(p.target()(0).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.original_target()(0).real(), 1.0, 0.0);
  EXPECT_NEAR(two_target().w0().norm(), 1.0, 1e-15);
}

TEST(SpanProgramModel, RejectsOverlappingVariables) {
  CMat a(1, 2);
  a << 1, 1;
  CVec tau(1);
  tau << 1;
  const CMat id = CMat::Identity(2, 2);
  EXPECT_THROW(SpanProgram(a, tau, {{CMat(2, 0), id.col(0)}, {CMat(2, 0), id.col(0)}}, CMat(2, 0), CMat(2, 0)),
               ValidationError);
  EXPECT_THROW(SpanProgram(a, tau, {{CMat(2, 0), id.col(0)}}, CMat(2, 0), CMat(2, 0)), ValidationError);
}

TEST(PositiveWitness, OrProgram) {
  const PositiveWitness both = positive_witness(or2(), {1, 1});
  EXPECT_NEAR(both.size, 1.0, 1e-12);
  EXPECT_LT((both.witness - or2().w0()).norm(), 1e-12);
  const PositiveWitness one = positive_witness(or2(), {1, 0});
  EXPECT_NEAR(one.size, 2.0, 1e-12);
  EXPECT_NEAR(one.witness(0).real(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(one.witness(1)), 0.0, 1e-12);
}

TEST(PositiveWitness, NegativeInputNamesResidual) {
  try {
    positive_witness(or2(), {0, 0});
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
  EXPECT_THROW(positive_witness(two_target(), {0, 0}), ValidationError);
  EXPECT_THROW(positive_witness(or2(), {1}), ValidationError);
}

TEST(NegativeWitness, OrProgram) {
  const NegativeWitness one = negative_witness(or2(), {1, 0});
  EXPECT_NEAR(one.omega(0).real(), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(one.error, 0.5, 1e-12);
  EXPECT_NEAR(one.size, 1.0, 1e-12);
  EXPECT_NEAR(negative_witness(or2(), {1, 1}).size, 1.0, 1e-12);
}

TEST(NegativeWitness, TwoTargetMatchesBruteForce) {
  for (const std::vector<int>& x : {std::vector<int>{1, 1}, {1, 0}, {0, 1}}) {
    const NegativeWitness w = negative_witness(two_target(), x);
    const BruteNegative b = brute_two_target(x);
    EXPECT_NEAR(w.error, b.error, 1e-6) << x[0] << x[1];
    EXPECT_NEAR(w.size, b.size, 1e-6) << x[0] << x[1];
    EXPECT_NEAR(std::abs(w.omega.dot(two_target().target())), 1.0, 1e-12);
  }
}

TEST(PseudoinverseIdentity, FixedPrograms) {
  const PseudoinverseReport one = pseudoinverse_identity(or2(), {1, 0});
  EXPECT_NEAR(one.pseudoinverse_side, 1.0, 1e-12);
  EXPECT_NEAR(pseudoinverse_identity(or2(), {1, 1}).pseudoinverse_side, 1.0, 1e-12);
  for (const std::vector<int>& x : {std::vector<int>{1, 1}, {1, 0}, {0, 1}}) {
    EXPECT_LT(pseudoinverse_identity(two_target(), x).gap, 1e-8);
  }
}

TEST(PseudoinverseIdentity, RandomPrograms) {
  int with_second_stage = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = span_fixtures::random_instance(seed);
    EXPECT_LE(inst.program.target_dim(), 8);
    EXPECT_LE(inst.program.input_dim(), 10);
    const PseudoinverseReport r = pseudoinverse_identity(inst.program, inst.input);
    EXPECT_LT(r.gap, 1e-8 * std::max(1.0, r.witness_side)) << seed;
    EXPECT_GE(r.witness_side, 1.0 - 1e-9);
    const PositiveWitness pos = positive_witness(inst.program, inst.input);
    EXPECT_GE(pos.size, 1.0 - 1e-9);
    EXPECT_LT(pos.identity_gap, 1e-9);
    with_second_stage += negative_witness(inst.program, inst.input).error > 1e-12;
  }
  EXPECT_GT(with_second_stage, 0);
}

TEST(ProjectorInstance, OrProgram) {
  const ProjectorInstance both = to_projector_instance(or2(), {1, 1});
  EXPECT_NEAR(1.0 / both.invariant_overlap_sq, 1.0, 1e-12);
  const ProjectorInstance one = to_projector_instance(or2(), {1, 0});
  EXPECT_NEAR(one.generic_complexity, 0.0, 1e-12);
  EXPECT_NEAR(1.0 / one.invariant_overlap_sq, 2.0, 1e-12);
  // The estimator reads omega = 1 / ||P psi||^2 = w_+.
  const EstimateRecord r = witness_size_estimate(one.pi, one.delta, one.psi, 2.0, 64, 3);
  EXPECT_NEAR(r.exact, 2.0, 1e-10);
}

TEST(ProjectorInstance, ComplexityIsNegativeSizeMinusOne) {
  for (const std::vector<int>& x : {std::vector<int>{1, 1}, {1, 0}, {0, 1}}) {
    const ProjectorInstance inst = to_projector_instance(two_target(), x);
    EXPECT_NEAR(inst.generic_complexity, inst.negative_size - 1.0, 1e-8);
    EXPECT_NEAR(inst.effective_gap_complexity, inst.negative_size - 1.0, 1e-8);
  }
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto r = span_fixtures::random_instance(seed);
    const ProjectorInstance inst = to_projector_instance(r.program, r.input);
    EXPECT_NEAR(inst.generic_complexity, inst.negative_size - 1.0, 1e-8 * std::max(1.0, inst.negative_size));
  }
}

TEST(SpanProgramJson, RoundTripsTwoTarget) {
  const auto j = nlohmann::json::parse(R"({
    "dims": {"H": 3, "V": 2},
    "A": [[1, 0, 1], [0, 1, 1]],
    "tau": [1, 0],
    "blocks": [
      {"var": 0, "value": 0, "basis": [[0, 0, 1]]},
      {"var": 0, "value": 1, "basis": [[1, 0, 0]]},
      {"var": 1, "value": 0, "basis": []},
      {"var": 1, "value": 1, "basis": [[0, [1, 0], 0]]}
    ]
  })");
  const SpanProgram p = span_program_from_json(j);
  EXPECT_LT((p.w0() - two_target().w0()).norm(), 1e-14);
  EXPECT_NEAR(negative_witness(p, {1, 0}).size, negative_witness(two_target(), {1, 0}).size, 1e-12);
}

TEST(SpanProgramJson, RejectsMalformed) {
  EXPECT_THROW(span_program_from_json(nlohmann::json::parse(R"({"dims": {"H": 2}})")), ValidationError);
  EXPECT_THROW(span_program_from_json(nlohmann::json::parse(
                   R"({"dims": {"H": 2, "V": 1}, "A": [[1, 1]], "tau": [1, 2], "blocks": []})")),
               ValidationError);
}

}  // namespace
}  // namespace elfs
