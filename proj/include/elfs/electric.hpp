#pragma once

#include <vector>

#include "elfs/graph.hpp"
#include "elfs/linalg.hpp"
#include "json.hpp"

namespace elfs {

/// Unit electric flow from the source to the sink set.
struct ElectricSolution {
  int source = 0;
  RVec voltage;              // v_x, zero on M
  std::vector<double> flow;  // f per arc; flow[2k + 1] == -flow[2k]
  double resistance = 0.0;   // R_s = v_s
  double demand_residual = 0.0;
};

struct ArrivalDistribution {
  std::vector<int> sinks;
  std::vector<double> prob;  // aligned with sinks
};

/// Dirichlet problem L v = e_s on V \ M with v|_M = 0, flow f_xy = w_xy (v_x - v_y).
ElectricSolution solve_electric(const Graph& g);

/// Dissipated energy (1/2) sum_arcs f^2 / w.
double energy(const Graph& g, const ElectricSolution& sol);

/// max-norm deviation of the flow's divergence from the unit s-M demand.
double demand_residual(const Graph& g, const std::vector<double>& arc_flow);

/// Inverse of the Laplacian restricted to V \ M, embedded as an n x n matrix with
/// zero rows and columns on M. Column x holds the voltages of the unit flow from x.
RMat interior_green(const Graph& g);

/// Absorption distribution of the random walk from s over M.
ArrivalDistribution harmonic_measure(const Graph& g);

/// Both sides of the modified-graph escape-time identity, plus the bound check.
struct EscapeIdentity {
  double resistance_times_degree = 0.0;  // R_sigma d_sigma on the modified graph
  double one_plus_eta_rd = 0.0;          // 1 + eta R_s d_s
  double escape_time = 0.0;              // ET_sigma from the voltage formula
  double term_stub = 0.0;                // R_sigma d_sigma
  double term_source = 0.0;              // eta R_s^2 d_s / R_sigma
  double term_rest = 0.0;                // (R_s / R_sigma) ET_s
  double decomposition = 0.0;            // sum of the three terms
  double ratio = 0.0;                    // ET_sigma / (R_sigma d_sigma)
  double ratio_bound = 0.0;              // 2 + ET_s / (eta R_s d_s)
  bool bound_holds = false;
};
EscapeIdentity modified_escape_identity(const ModifiedGraph& mg);

nlohmann::json to_json(const Graph& g, const ElectricSolution& sol);

}  // namespace elfs
