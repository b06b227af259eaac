#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elfs/graph.hpp"
#include "json.hpp"

namespace elfs {

// ---------------------------------------------------------------------------
// Bound checks on random regular graphs.

struct ExpanderInstance {
  std::uint64_t seed = 0;
  double delta = 0.0;               // absolute spectral gap of P
  double max_resistance = 0.0;      // max_x R_x
  double max_escape_time = 0.0;     // max_x ET_x
  double max_hitting_time = 0.0;    // max_x HT_x
  double max_eht = 0.0;             // max_x EHT_x
  double q_norm = 0.0;
  double q_norm_bound = 0.0;        // 1 - delta m / n
  bool q_norm_holds = false;
  bool q_mixing_holds = false;
  double min_absorption = 0.0;      // min_x Pr(one elfs step from x lands in M)
  double arrival_gap = 0.0;         // max |elfs arrival - harmonic measure| over sources
  double estimated_tv = 0.0;        // max_x TV of arrival under +-10% R_x d_x perturbations
};

/// Fitted constants; each is the max over seeds of the per-instance ratio.
struct ExpanderConstants {
  double resistance = 0.0;   // max R_x
  double escape = 0.0;       // max ET_x / (1 + n / m^2)
  double hitting = 0.0;      // max HT_x / (n / m + ln n)
  double eht = 0.0;          // max EHT_x / min{m, n / m + ln n}
  double absorption = 0.0;   // min over seeds and x of m * Pr(absorbed in one step)
};

struct ExpanderReport {
  int n = 0, d = 0, m = 0;
  std::vector<ExpanderInstance> instances;
  ExpanderConstants constants;
  bool all_finite = false;
  bool q_norm_holds = false;
  bool q_mixing_holds = false;
  double max_arrival_gap = 0.0;
  double max_estimated_tv = 0.0;
};

struct ExpanderOptions {
  int mixing_steps = 8;        // t range for the Q^t entry bound
  double perturbation = 0.1;   // relative error of R_x d_x in the estimated chain
  bool estimated_tv = true;
};

ExpanderReport expander_stats(int n, int d, int m, const std::vector<std::uint64_t>& seeds,
                              const ExpanderOptions& opts = {});
/// Single-seed report; combine_reports merges these into the multi-seed form.
ExpanderReport expander_seed_report(int n, int d, int m, std::uint64_t seed, const ExpanderOptions& opts = {});
ExpanderReport combine_reports(const std::vector<ExpanderReport>& parts);

/// Growth of each fitted constant between consecutive reports (later / earlier); the
/// constants may shrink freely.
struct DriftReport {
  std::map<std::string, double> max_growth;
  bool within = false;   // every growth <= limit
};
DriftReport constant_drift(const std::vector<ExpanderReport>& by_scale, double limit = 2.0);

// ---------------------------------------------------------------------------
// Label propagation by absorption.

struct LabeledGraph {
  Graph graph;
  std::map<int, int> labels;  // exactly the sinks, values in {0, 1}
};

LabeledGraph make_labeled_graph(Graph g, std::map<int, int> labels);
/// Lines "vertex label"; '#' starts a comment.
std::map<int, int> load_labels(const std::string& text);

enum class SslMethod { exact, walk_mc, elfs_mc, quantum_sim };
SslMethod parse_ssl_method(const std::string& name);
std::string to_string(SslMethod m);

struct SslOptions {
  SslMethod method = SslMethod::exact;
  long samples = 10000;
  double cost_budget = 1e9;   // walk steps (walk-mc) or elfs complexity (elfs-mc, quantum-sim)
  std::uint64_t seed = 1;
};

struct SslResult {
  double estimate = 0.0;      // sum_x p_x b_x
  int label = 0;              // estimate >= 1/2
  double standard_error = 0.0;
  long samples = 0;
  double walk_steps = 0.0;    // random-walk steps spent (walk-mc)
  double elfs_cost = 0.0;     // sum over samples of sum_t sqrt(ET_{Y_t})
  long elfs_steps = 0;
  bool partial = false;       // budget ran out before all samples were drawn
  std::string source;         // where the arrival law came from
};

SslResult ssl_label(const LabeledGraph& lg, const SslOptions& opts = {});

nlohmann::json to_json(const ExpanderReport& r);
nlohmann::json to_json(const DriftReport& r);
nlohmann::json to_json(const SslResult& r);

}  // namespace elfs
