#include "elfs/electric.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "elfs/errors.hpp"

namespace elfs {
namespace {

// Interior (non-sink) vertices, and the map vertex -> interior index (-1 on M).
std::vector<int> interior_index(const Graph& g, std::vector<int>& interior) {
  std::vector<int> idx(g.num_vertices(), -1);
  interior.clear();
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (!g.is_sink(x)) {
      idx[x] = static_cast<int>(interior.size());
      interior.push_back(x);
    }
  }
  return idx;
}

RMat restricted_laplacian(const Graph& g, const std::vector<int>& idx, int size) {
  RMat lap = RMat::Zero(size, size);
  for (const Edge& e : g.edges()) {
    const int a = idx[e.u], b = idx[e.v];
    if (a >= 0) lap(a, a) += e.w;
    if (b >= 0) lap(b, b) += e.w;
    if (a >= 0 && b >= 0) {
      lap(a, b) -= e.w;
      lap(b, a) -= e.w;
    }
  }
  return lap;
}

void require_connected(const Graph& g) {
  const auto stranded = g.stranded_vertices();
  if (stranded.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < stranded.size(); ++i) list += (i ? ", " : "") + std::to_string(stranded[i]);
  throw ValidationError("restricted Laplacian is singular: component {" + list +
                        "} has no path to the sink set");
}

}  // namespace

double demand_residual(const Graph& g, const std::vector<double>& arc_flow) {
  std::vector<double> out(g.num_vertices(), 0.0);
  for (int a = 0; a < g.num_arcs(); ++a) out[g.arc(a).from] += arc_flow[a];
  double res = std::abs(out[g.source()] - 1.0);
  double into_sinks = 0.0;
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (g.is_sink(x)) {
      into_sinks -= out[x];
    } else if (x != g.source()) {
      res = std::max(res, std::abs(out[x]));
    }
  }
  return std::max(res, std::abs(into_sinks - 1.0));
}

ElectricSolution solve_electric(const Graph& g) {
  require_connected(g);
  std::vector<int> interior;
  const auto idx = interior_index(g, interior);
  const RMat lap = restricted_laplacian(g, idx, static_cast<int>(interior.size()));
  Eigen::LLT<RMat> llt(lap);
  if (llt.info() != Eigen::Success) {
    throw ToleranceError("restricted Laplacian factorization failed");
  }
  RVec rhs = RVec::Zero(static_cast<Eigen::Index>(interior.size()));
  rhs(idx[g.source()]) = 1.0;
  const RVec v_int = llt.solve(rhs);

  ElectricSolution sol;
  sol.source = g.source();
  sol.voltage = RVec::Zero(g.num_vertices());
  for (std::size_t i = 0; i < interior.size(); ++i) sol.voltage(interior[i]) = v_int(i);
  sol.resistance = sol.voltage(g.source());
  sol.flow.resize(g.num_arcs());
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc arc = g.arc(a);
    sol.flow[a] = arc.w * (sol.voltage(arc.from) - sol.voltage(arc.to));
  }
  sol.demand_residual = demand_residual(g, sol.flow);
  return sol;
}

double energy(const Graph& g, const ElectricSolution& sol) {
  double e = 0.0;
  for (int a = 0; a < g.num_arcs(); ++a) e += sol.flow[a] * sol.flow[a] / g.arc(a).w;
  return 0.5 * e;
}

RMat interior_green(const Graph& g) {
  require_connected(g);
  std::vector<int> interior;
  const auto idx = interior_index(g, interior);
  const int k = static_cast<int>(interior.size());
  Eigen::LLT<RMat> llt(restricted_laplacian(g, idx, k));
  if (llt.info() != Eigen::Success) {
    throw ToleranceError("restricted Laplacian factorization failed");
  }
  const RMat inv = llt.solve(RMat::Identity(k, k));
  RMat green = RMat::Zero(g.num_vertices(), g.num_vertices());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) green(interior[i], interior[j]) = inv(i, j);
  }
  return green;
}

ArrivalDistribution harmonic_measure(const Graph& g) {
  // Absorption probability at m: B = (I - Q)^{-1} P_{T,M}; (I - Q) = D^{-1} L_int,
  // so row s of B is e_s^T L_int^{-1} D P_{T,M} = sum_x v_x w_xm.
  const ElectricSolution sol = solve_electric(g);
  ArrivalDistribution out;
  out.sinks = g.sinks();
  for (int m : g.sinks()) {
    double p = 0.0;
    for (const Neighbor& nb : g.neighbors(m)) p += sol.voltage(nb.vertex) * nb.w;
    out.prob.push_back(p);
  }
  return out;
}

EscapeIdentity modified_escape_identity(const ModifiedGraph& mg) {
  const Graph original = detach_source_stub(mg);
  const ElectricSolution sol = solve_electric(original);
  const ElectricSolution hat = solve_electric(mg.graph);
  const double r = sol.resistance;
  const double d = original.degree(original.source());
  const double r_hat = hat.resistance;
  const double d_hat = mg.graph.degree(mg.sigma);

  double et = 0.0;
  for (int x = 0; x < original.num_vertices(); ++x) {
    et += sol.voltage(x) * sol.voltage(x) * original.degree(x);
  }
  et /= r;
  double et_hat = 0.0;
  for (int x = 0; x < mg.graph.num_vertices(); ++x) {
    et_hat += hat.voltage(x) * hat.voltage(x) * mg.graph.degree(x);
  }
  et_hat /= r_hat;

  EscapeIdentity id;
  id.resistance_times_degree = r_hat * d_hat;
  id.one_plus_eta_rd = 1.0 + mg.eta * r * d;
  id.escape_time = et_hat;
  id.term_stub = r_hat * d_hat;
  id.term_source = mg.eta * r * r * d / r_hat;
  id.term_rest = (r / r_hat) * et;
  id.decomposition = id.term_stub + id.term_source + id.term_rest;
  id.ratio = et_hat / (r_hat * d_hat);
  id.ratio_bound = 2.0 + et / (mg.eta * r * d);
  id.bound_holds = id.ratio <= id.ratio_bound * (1.0 + 1e-12);
  return id;
}

nlohmann::json to_json(const Graph& g, const ElectricSolution& sol) {
  nlohmann::json arcs = nlohmann::json::array();
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc arc = g.arc(a);
    arcs.push_back({arc.from, arc.to, sol.flow[a]});
  }
  std::vector<double> v(sol.voltage.data(), sol.voltage.data() + sol.voltage.size());
  return {{"voltages", v},
          {"flow_arcs", arcs},
          {"R_s", sol.resistance},
          {"residuals", {{"demand", sol.demand_residual},
                         {"energy_minus_R", energy(g, sol) - sol.resistance}}}};
}

}  // namespace elfs
