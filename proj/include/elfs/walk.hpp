#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "elfs/errors.hpp"
#include "elfs/graph.hpp"
#include "elfs/linalg.hpp"
#include "elfs/rng.hpp"
#include "json.hpp"

namespace elfs {

/// Exact random-walk quantities for the walk from s absorbed at M.
struct WalkStats {
  double resistance = 0.0;           // R_s
  double escape_probability = 0.0;   // p_s = 1 / (R_s d_s)
  double hitting_time = 0.0;         // HT_s
  double escape_time = 0.0;          // ET_s
  double commute_time = 0.0;         // CT_s = R_s W
};

WalkStats walk_quantities(const Graph& g);

/// Per-vertex cumulative transition tables for sampling steps w_xy / d_x.
class WalkSampler {
 public:
  explicit WalkSampler(const Graph& g);
  int step(int x, Rng& rng) const;
  const Graph& graph() const { return *g_; }

 private:
  const Graph* g_;
  std::vector<std::vector<double>> cumulative_;
};

struct WalkTrace {
  std::vector<int> path;   // X_0 = s, ..., X_tau in M (extended to the return to s with commute)
  long tau = 0;            // first hitting time of M
  long sigma = 0;          // 1 + last t < tau with X_t = s
  long kappa = -1;         // first return to s after tau; -1 unless requested
  std::uint64_t seed = 0;
};

/// Budget overrun; carries the trajectory sampled so far.
class WalkBudgetError : public BudgetError {
 public:
  WalkBudgetError(const std::string& what, WalkTrace partial)
      : BudgetError(what), partial_(std::move(partial)) {}
  const WalkTrace& partial() const { return partial_; }

 private:
  WalkTrace partial_;
};

inline constexpr long kDefaultWalkBudget = 10'000'000;

struct WalkOptions {
  bool commute = false;        // keep walking after absorption until back at s
  bool record_path = true;
  long step_budget = kDefaultWalkBudget;
};

WalkTrace simulate_walk(const Graph& g, std::uint64_t seed, const WalkOptions& opts = {});
WalkTrace simulate_walk(const WalkSampler& sampler, std::uint64_t seed, const WalkOptions& opts = {});

enum class SeriesMode { exact_inverse, truncated };

struct FundamentalStats {
  WalkStats stats;                      // from the voltage formulas
  std::vector<double> visits;           // E_s[# visits to x before tau], zero on M
  std::vector<double> visits_voltage;   // d_x v_x, the same quantity from the electric solution
  double hitting_time = 0.0;            // sum_x visits
  double return_sum = 0.0;              // sum_t Q^t_ss = R_s d_s
  std::optional<double> series_escape_time;  // (1/(d_s R_s)) sum_t (t+1) Q^t_ss, regular only
  int series_terms = 0;                 // t_max + 1 for truncated mode
};

FundamentalStats fundamental_matrix_stats(const Graph& g, SeriesMode mode = SeriesMode::exact_inverse,
                                          int t_max = 0);

/// Transition matrix P = D^{-1} A of the whole graph (sinks not absorbing).
RMat transition_matrix(const Graph& g);

/// Transient block Q of P on V \ M, with the row/column vertex labels.
RMat transient_block(const Graph& g, std::vector<int>* labels = nullptr);

/// Absolute spectral gap 1 - max_{i >= 2} |lambda_i(P)|.
double spectral_gap(const Graph& g);

/// Checks of ||Q|| <= 1 - delta m / n and Q^t_sx <= 1/n + (1 - delta)^t for t < t_max.
struct QBoundReport {
  double delta = 0.0;
  double q_norm = 0.0;
  double q_norm_bound = 0.0;
  bool norm_bound_holds = false;
  double worst_mixing_slack = 0.0;  // min over (t, x) of bound - Q^t_sx
  bool mixing_bound_holds = false;
};
QBoundReport q_matrix_bounds(const Graph& g, int t_max);

nlohmann::json to_json(const WalkStats& s);

}  // namespace elfs
