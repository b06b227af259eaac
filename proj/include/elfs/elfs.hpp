#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "elfs/amplification.hpp"
#include "elfs/graph.hpp"
#include "elfs/linalg.hpp"
#include "elfs/rng.hpp"
#include "elfs/transducer.hpp"
#include "json.hpp"

namespace elfs {

// ---------------------------------------------------------------------------
// Fixed-point preparation.

/// Angles of the fixed-point search sequence
///   S_s(start_phase[l]) S_f(target_phase[l]) ... S_s(start_phase[0]) S_f(target_phase[0]),
/// with S_f(a) = I - (1 - e^{ia})|f><f| and S_s(b) = I - (1 - e^{-ib})|start><start|.
struct AngleSchedule {
  int length = 1;                    // odd sequence length L = 2 * pairs + 1
  std::vector<double> target_phase;  // theta_l
  std::vector<double> start_phase;   // phi_l
  double error = 0.0;                // eps: final squared overlap >= 1 - eps^2
  double min_overlap_sq = 1.0;       // lower bound on |<start|target>|^2 the schedule covers
  double worst_sweep_overlap_sq = 1.0;
  int pairs() const { return static_cast<int>(target_phase.size()); }
};

/// Schedule valid for every initial squared overlap >= min_overlap_sq. Validated by
/// simulating the two-dimensional model on 100 overlaps; throws ToleranceError on failure.
AngleSchedule fixed_point_angles(double min_overlap_sq, double eps);

/// Final squared overlap of the schedule applied in the plane of start and target.
double schedule_overlap_sq(const AngleSchedule& s, double initial_overlap_sq);

struct FixedPointResult {
  AngleSchedule schedule;
  CVec output;                 // public output on l(E)
  CVec target;                 // |f>
  double overlap = 0.0;        // |<f|out>|
  double complexity = 0.0;     // measured W of the composition
  double formula_complexity = 0.0;
  double bound = 0.0;          // (1/sqrt(pbar)) (ET_s / (R_s d_s)) ln(1/eps)
  double residual = 0.0;
  double step_residual = 0.0;  // worst per-rotation output residual
};

/// |phi_s> -> |f> + O(eps) by composing elfs rotations. Requires pbar <= 1/(R_s d_s).
FixedPointResult fixed_point_prepare(const Graph& g, double pbar, double eps);

/// |<f_hat|f>|^2 with f embedded in the modified graph; checked against R_s / R_hat.
struct FlowOverlap {
  double overlap_sq = 0.0;
  double closed_form = 0.0;  // R_s / R_hat_sigma
};
FlowOverlap modified_flow_overlap(const Graph& g, double eta);

// ---------------------------------------------------------------------------
// Exact preparation.

struct ExactElfOptions {
  std::optional<double> eta;          // stub parameter; default et_bar / rd_estimate
  std::optional<double> et_bar;       // upper bound on ET_s; default exact
  std::optional<double> rd_estimate;  // constant-factor estimate of R_s d_s; default exact
  bool modified = true;               // false: prepare |f> on the original graph
  ZeroErrorOptions aa{.runs = 10000, .m_max = 10000, .tail_bound = 1e-12, .max_counter = 1L << 22};
};

struct ExactElfResult {
  Graph graph;            // the graph whose flow is prepared
  double eta = 0.0;       // 0 when unmodified
  double alpha = 0.0;     // <phi|f> on that graph
  double et_bar = 0.0;
  double complexity = 0.0;
  double ratio = 0.0;     // complexity / sqrt(et_bar)
  double fidelity = 0.0;  // composed output against the target
  CVec target{};
  CMat output_state{};    // reduced output state on l(E)
  ZeroErrorResult aa{};
};

ExactElfResult exact_elf_prepare(const Graph& g, std::uint64_t seed, const ExactElfOptions& opts = {});

// ---------------------------------------------------------------------------
// Classical elfs process.

/// Next-source distribution from x, read off |f_x>'s first register (size n).
/// With eta set, the flow is prepared on the modified graph around x and the
/// stub vertex counts as x.
std::vector<double> elfs_step_distribution(const Graph& g, int x, std::optional<double> eta = {});

struct ElfsChainOptions {
  bool modified = false;
  std::vector<double> eta;  // per vertex; empty: ET_x / (R_x d_x)
};

struct ElfsChain {
  int n = 0;
  std::vector<int> sinks;
  RMat step;                  // n x n; sink rows absorb
  RVec resistance;            // R_x, zero on M
  RVec hitting_time;          // HT_x
  RVec escape_time;           // ET_x
  RVec self_loop;             // stub mass per vertex (modified mode)
  RMat visits;                // expected elfs visits N(x, y) before absorption
  RVec eht;                   // expected steps to absorption
  RMat arrival;               // n x |M|
  double row_sum_defect = 0.0;
  double spectral_radius_bound = 0.0;  // 1 - 1 / max EHT
};

ElfsChain elfs_chain(const Graph& g, const ElfsChainOptions& opts = {});

/// Per-source sampling tables, built on demand from the interior Green function.
class ElfsSampler {
 public:
  explicit ElfsSampler(const Graph& g);

  const Graph& graph() const { return g_; }
  /// Arc sampled with probability f_a^2 / (2 R_x w_a).
  int sample_arc(int x, Rng& rng) const;
  /// Stop probability at y when coupling the step from x to a walk.
  double stop_probability(int x, int y) const;
  /// Step distribution over vertices from x.
  const std::vector<double>& step_distribution(int x) const;
  /// Expected walk steps per elfs step from x.
  double coupled_mean_steps(int x) const;
  int walk_step(int y, Rng& rng) const;

 private:
  struct Table {
    std::vector<double> arc_cumulative;
    std::vector<double> step;
    std::vector<double> stop;
    double mean_steps = 0.0;
  };
  const Table& table(int x) const;

  Graph g_;
  RMat green_;
  std::vector<std::vector<double>> walk_cumulative_;
  mutable std::map<int, Table> tables_;
};

struct ElfsTrace {
  std::vector<int> sources;  // Y_0 = s, ..., Y_rho in M
  std::vector<int> arcs;     // sampled arc per step (independent mode)
  std::vector<long> nu;      // coupled: nu_1 <= ... <= nu_rho = tau
  std::vector<int> walk;     // coupled: X_0, ..., X_tau
  long rho = 0;
  std::uint64_t seed = 0;
  bool coupled = false;
};

struct ElfsOptions {
  bool coupled = false;
  bool record_walk = true;
  long max_elfs_steps = 10'000'000;
  long walk_step_budget = 10'000'000;
};

ElfsTrace simulate_elfs(const ElfsSampler& sampler, std::uint64_t seed, const ElfsOptions& opts = {});
ElfsTrace simulate_elfs(const Graph& g, std::uint64_t seed, const ElfsOptions& opts = {});

struct CouplingReport {
  double sum_et = 0.0;         // E[sum_{t < rho} ET_{Y_t}] from the chain
  double twice_ht = 0.0;       // 2 HT_s
  double identity_gap = 0.0;
  int samples = 0;
  double nu1_mean = 0.0, nu1_se = 0.0;
  double nu1_expected = 0.0;   // ET_s / 2
  double nu1_z = 0.0;
  double tau_mean = 0.0;       // E[nu_rho] = HT_s
  double tau_se = 0.0;
  double rho_mean = 0.0;
  double rho_se = 0.0;
  bool exact_ok = false;
  bool monte_carlo_ok = false;
};

CouplingReport coupling_identities(const Graph& g, int samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Quantum elfs process.

enum class ElfsParameterMode { exact, estimated };

struct QuantumElfsOptions {
  int depth_cap = 2;
  bool modified = true;
  ElfsParameterMode mode = ElfsParameterMode::exact;
  double perturbation = 0.1;  // relative error of R_x d_x in estimated mode
  std::uint64_t seed = 1;
  ZeroErrorOptions aa{.runs = 200, .m_max = 10000, .tail_bound = 1e-12, .max_counter = 1L << 22};
};

struct ElfsPath {
  std::vector<int> vertices;  // y_0, ..., y_k
  double probability = 0.0;
  bool absorbed = false;
};

struct QuantumElfsResult {
  std::vector<ElfsPath> paths;      // absorbed paths and depth-capped survivors
  std::vector<double> eta;          // per vertex
  std::vector<double> step_complexity;  // W of the exact preparation from x
  double remaining_mass = 0.0;      // Pr(rho > depth_cap)
  double complexity = 0.0;          // composed W
  double reference = 0.0;           // E[sum_{t < min(rho, cap)} sqrt(ET_bar_{Y_t})]
  double ratio = 0.0;
  double chain_deviation = 0.0;     // max |register diagonal - chain path probability|
  std::vector<double> arrival;      // absorbed mass per sink (aligned with g.sinks())
  double min_fidelity = 1.0;
};

QuantumElfsResult quantum_elfs_process(const Graph& g, const QuantumElfsOptions& opts = {});

/// Probability of each vertex path under the chain, summed over paths of the same shape as
/// in `paths` (absorbed or capped).
double chain_path_probability(const ElfsChain& chain, const std::vector<int>& path);

nlohmann::json to_json(const ElfsChain& c, const Graph& g);
nlohmann::json to_json(const CouplingReport& r);
nlohmann::json to_json(const FixedPointResult& r);
nlohmann::json to_json(const QuantumElfsResult& r);

}  // namespace elfs
