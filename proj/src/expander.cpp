#include "elfs/expander.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "elfs/electric.hpp"
#include "elfs/elfs.hpp"
#include "elfs/errors.hpp"
#include "elfs/rng.hpp"
#include "elfs/walk.hpp"

namespace elfs {

namespace {

// Absorption probabilities of the random walk from every vertex, rows aligned with g.sinks().
RMat walk_arrival(const Graph& g) {
  std::vector<int> labels;
  const RMat q = transient_block(g, &labels);
  const int k = static_cast<int>(labels.size());
  const std::vector<int>& sinks = g.sinks();
  RMat r = RMat::Zero(k, static_cast<int>(sinks.size()));
  for (int i = 0; i < k; ++i) {
    const int x = labels[i];
    for (const Neighbor& nb : g.neighbors(x)) {
      const auto it = std::find(sinks.begin(), sinks.end(), nb.vertex);
      if (it != sinks.end()) r(i, it - sinks.begin()) += nb.w / g.degree(x);
    }
  }
  const RMat h = (RMat::Identity(k, k) - q).partialPivLu().solve(r);
  RMat out = RMat::Zero(g.num_vertices(), static_cast<int>(sinks.size()));
  for (int i = 0; i < k; ++i) out.row(labels[i]) = h.row(i);
  for (std::size_t j = 0; j < sinks.size(); ++j) out(sinks[j], j) = 1.0;
  return out;
}

double max_tv(const RMat& a, const RMat& b) {
  return 0.5 * (a - b).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

ExpanderReport expander_stats(int n, int d, int m, const std::vector<std::uint64_t>& seeds,
                              const ExpanderOptions& opts) {
  if (seeds.empty()) throw ValidationError("expander_stats needs at least one seed");
  std::vector<ExpanderReport> parts;
  for (std::uint64_t seed : seeds) parts.push_back(expander_seed_report(n, d, m, seed, opts));
  return combine_reports(parts);
}

ExpanderReport expander_seed_report(int n, int d, int m, std::uint64_t seed, const ExpanderOptions& opts) {
  ExpanderReport rep;
  rep.n = n;
  rep.d = d;
  rep.m = m;
  const double ln_n = std::log(static_cast<double>(n));
  const double et_scale = 1.0 + double(n) / (double(m) * m);
  const double ht_scale = double(n) / m + ln_n;
  const double eht_scale = std::min(double(m), double(n) / m + ln_n);

  const Graph g = random_regular_graph(n, d, m, seed);
  ExpanderInstance inst;
  inst.seed = seed;
  const QBoundReport qb = q_matrix_bounds(g, opts.mixing_steps);
  inst.delta = qb.delta;
  inst.q_norm = qb.q_norm;
  inst.q_norm_bound = qb.q_norm_bound;
  inst.q_norm_holds = qb.norm_bound_holds;
  inst.q_mixing_holds = qb.mixing_bound_holds;

  const ElfsChain c = elfs_chain(g);
  inst.min_absorption = std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    if (g.is_sink(x)) continue;
    inst.max_resistance = std::max(inst.max_resistance, c.resistance(x));
    inst.max_escape_time = std::max(inst.max_escape_time, c.escape_time(x));
    inst.max_hitting_time = std::max(inst.max_hitting_time, c.hitting_time(x));
    inst.max_eht = std::max(inst.max_eht, c.eht(x));
    double absorb = 0.0;
    for (int s : c.sinks) absorb += c.step(x, s);
    inst.min_absorption = std::min(inst.min_absorption, absorb);
  }
  inst.arrival_gap = (c.arrival - walk_arrival(g)).cwiseAbs().maxCoeff();

  if (opts.estimated_tv) {
    // Stub parameters from R_x d_x estimates off by up to the perturbation.
    Rng rng = make_rng(seed, 0xe57);
    ElfsChainOptions eo;
    eo.modified = true;
    eo.eta.assign(n, 1.0);
    for (int x = 0; x < n; ++x) {
      if (g.is_sink(x)) continue;
      const double rd = c.resistance(x) * g.degree(x);
      const double noisy = rd * (1.0 + opts.perturbation * (2.0 * uniform01(rng) - 1.0));
      eo.eta[x] = std::max(1.0, c.escape_time(x) / noisy);
    }
    inst.estimated_tv = max_tv(elfs_chain(g, eo).arrival, c.arrival);
  }

  rep.constants = {inst.max_resistance, inst.max_escape_time / et_scale, inst.max_hitting_time / ht_scale,
                   inst.max_eht / eht_scale, m * inst.min_absorption};
  rep.q_norm_holds = inst.q_norm_holds;
  rep.q_mixing_holds = inst.q_mixing_holds;
  rep.max_arrival_gap = inst.arrival_gap;
  rep.max_estimated_tv = inst.estimated_tv;
  rep.instances.push_back(inst);
  return rep;
}

ExpanderReport combine_reports(const std::vector<ExpanderReport>& parts) {
  if (parts.empty()) throw ValidationError("no reports to combine");
  ExpanderReport all = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const ExpanderReport& r = parts[i];
    if (r.n != all.n || r.d != all.d || r.m != all.m) throw ValidationError("reports differ in (n, d, m)");
    all.instances.insert(all.instances.end(), r.instances.begin(), r.instances.end());
    all.constants.resistance = std::max(all.constants.resistance, r.constants.resistance);
    all.constants.escape = std::max(all.constants.escape, r.constants.escape);
    all.constants.hitting = std::max(all.constants.hitting, r.constants.hitting);
    all.constants.eht = std::max(all.constants.eht, r.constants.eht);
    all.constants.absorption = std::min(all.constants.absorption, r.constants.absorption);
    all.q_norm_holds = all.q_norm_holds && r.q_norm_holds;
    all.q_mixing_holds = all.q_mixing_holds && r.q_mixing_holds;
    all.max_arrival_gap = std::max(all.max_arrival_gap, r.max_arrival_gap);
    all.max_estimated_tv = std::max(all.max_estimated_tv, r.max_estimated_tv);
  }
  const ExpanderConstants& k = all.constants;
  all.all_finite = true;
  for (double v : {k.resistance, k.escape, k.hitting, k.eht, k.absorption}) {
    all.all_finite = all.all_finite && std::isfinite(v) && v > 0.0;
  }
  return all;
}

DriftReport constant_drift(const std::vector<ExpanderReport>& by_scale, double limit) {
  DriftReport out;
  out.within = true;
  auto field = [](const ExpanderReport& r, const std::string& name) {
    if (name == "resistance") return r.constants.resistance;
    if (name == "escape") return r.constants.escape;
    if (name == "hitting") return r.constants.hitting;
    if (name == "eht") return r.constants.eht;
    return 1.0 / r.constants.absorption;  // a lower-bound constant drifts when it shrinks
  };
  for (const std::string name : {"resistance", "escape", "hitting", "eht", "absorption"}) {
    double growth = 0.0;
    for (std::size_t i = 1; i < by_scale.size(); ++i) {
      growth = std::max(growth, field(by_scale[i], name) / field(by_scale[i - 1], name));
    }
    out.max_growth[name] = growth;
    out.within = out.within && std::isfinite(growth) && growth <= limit;
  }
  return out;
}

// ---------------------------------------------------------------------------

LabeledGraph make_labeled_graph(Graph g, std::map<int, int> labels) {
  for (const auto& [v, b] : labels) {
    if (v < 0 || v >= g.num_vertices() || !g.is_sink(v)) {
      throw ValidationError("label given for vertex " + std::to_string(v) + ", which is not a sink");
    }
    if (b != 0 && b != 1) throw ValidationError("labels must be 0 or 1");
  }
  for (int m : g.sinks()) {
    if (!labels.count(m)) throw ValidationError("sink " + std::to_string(m) + " has no label");
  }
  return {std::move(g), std::move(labels)};
}

std::map<int, int> load_labels(const std::string& text) {
  std::map<int, int> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream ls(line);
    int v = 0, b = 0;
    if (!(ls >> v)) continue;
    std::string extra;
    if (!(ls >> b) || (ls >> extra)) throw ValidationError("labels line " + std::to_string(lineno) + ": expected 'vertex label'");
    if (!out.emplace(v, b).second) throw ValidationError("vertex " + std::to_string(v) + " labelled twice");
  }
  return out;
}

SslMethod parse_ssl_method(const std::string& name) {
  if (name == "exact") return SslMethod::exact;
  if (name == "walk-mc") return SslMethod::walk_mc;
  if (name == "elfs-mc") return SslMethod::elfs_mc;
  if (name == "quantum-sim") return SslMethod::quantum_sim;
  throw ValidationError("unknown ssl method '" + name + "'");
}

std::string to_string(SslMethod m) {
  switch (m) {
    case SslMethod::exact: return "exact";
    case SslMethod::walk_mc: return "walk-mc";
    case SslMethod::elfs_mc: return "elfs-mc";
    case SslMethod::quantum_sim: return "quantum-sim";
  }
  return "?";
}

namespace {

int sample_row(const RMat& step, int x, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const int n = static_cast<int>(step.cols());
  for (int y = 0; y < n; ++y) {
    acc += step(x, y);
    if (u < acc) return y;
  }
  for (int y = n - 1; y >= 0; --y) {
    if (step(x, y) > 0.0) return y;
  }
  return x;
}

}  // namespace

SslResult ssl_label(const LabeledGraph& lg, const SslOptions& opts) {
  const Graph& g = lg.graph;
  SslResult out;
  if (opts.method == SslMethod::exact) {
    const ArrivalDistribution h = harmonic_measure(g);
    for (std::size_t j = 0; j < h.sinks.size(); ++j) out.estimate += h.prob[j] * lg.labels.at(h.sinks[j]);
    out.label = out.estimate >= 0.5;
    out.source = "harmonic measure";
    return out;
  }
  if (opts.samples < 1) throw ValidationError("ssl needs at least one sample");

  const ElfsChain chain = elfs_chain(g);
  std::vector<double> sqrt_et(g.num_vertices(), 0.0);
  for (int x = 0; x < g.num_vertices(); ++x) sqrt_et[x] = std::sqrt(std::max(0.0, chain.escape_time(x)));

  std::optional<WalkSampler> walker;
  std::optional<ElfsSampler> elfs;
  std::optional<QuantumElfsResult> quantum;
  std::vector<double> path_cumulative;
  if (opts.method == SslMethod::walk_mc) {
    walker.emplace(g);
    out.source = "random walk";
  } else if (opts.method == SslMethod::elfs_mc) {
    elfs.emplace(g);
    out.source = "sampled elfs";
  } else if (g.num_vertices() <= 5) {
    QuantumElfsOptions qo;
    qo.depth_cap = 3;
    qo.seed = opts.seed;
    quantum = quantum_elfs_process(g, qo);
    double acc = 0.0;
    for (const ElfsPath& p : quantum->paths) path_cumulative.push_back(acc += p.probability);
    out.source = "quantum register distribution, chain continuation past depth 3";
  } else {
    out.source = "exact elfs chain (graph exceeds the register simulation limit)";
  }

  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < opts.samples; ++i) {
    const double spent = opts.method == SslMethod::walk_mc ? out.walk_steps : out.elfs_cost;
    if (spent >= opts.cost_budget) {
      out.partial = true;
      break;
    }
    const std::uint64_t stream = split_seed(opts.seed, static_cast<std::uint64_t>(i));
    int arrival = -1;
    if (walker) {
      const WalkTrace t = simulate_walk(*walker, stream);
      out.walk_steps += double(t.tau);
      arrival = t.path.back();
    } else if (elfs) {
      ElfsOptions eo;
      eo.record_walk = false;
      const ElfsTrace t = simulate_elfs(*elfs, stream, eo);
      for (long k = 0; k < t.rho; ++k) out.elfs_cost += sqrt_et[t.sources[k]];
      out.elfs_steps += t.rho;
      arrival = t.sources.back();
    } else {
      Rng rng(stream);
      int x = g.source();
      if (quantum) {
        const double u = uniform01(rng) * path_cumulative.back();
        const std::size_t k = std::min<std::size_t>(
            std::upper_bound(path_cumulative.begin(), path_cumulative.end(), u) - path_cumulative.begin(),
            quantum->paths.size() - 1);
        const ElfsPath& p = quantum->paths[k];
        out.elfs_cost += quantum->complexity;
        out.elfs_steps += static_cast<long>(p.vertices.size()) - 1;
        x = p.vertices.back();
      }
      while (!g.is_sink(x)) {
        out.elfs_cost += sqrt_et[x];
        ++out.elfs_steps;
        x = sample_row(chain.step, x, rng);
      }
      arrival = x;
    }
    const double b = lg.labels.at(arrival);
    sum += b;
    sum_sq += b * b;
    ++out.samples;
  }
  if (out.samples == 0) throw BudgetError("ssl cost budget exhausted before the first sample");
  const double k = double(out.samples);
  out.estimate = sum / k;
  out.standard_error = k > 1 ? std::sqrt(std::max(0.0, (sum_sq / k - out.estimate * out.estimate) / (k - 1))) : 0.0;
  out.label = out.estimate >= 0.5;
  return out;
}

nlohmann::json to_json(const ExpanderReport& r) {
  nlohmann::json inst = nlohmann::json::array();
  for (const ExpanderInstance& i : r.instances) {
    inst.push_back({{"seed", i.seed},
                    {"delta", i.delta},
                    {"max_R", i.max_resistance},
                    {"max_ET", i.max_escape_time},
                    {"max_HT", i.max_hitting_time},
                    {"max_EHT", i.max_eht},
                    {"Q_norm", i.q_norm},
                    {"Q_norm_bound", i.q_norm_bound},
                    {"Q_norm_holds", i.q_norm_holds},
                    {"Q_mixing_holds", i.q_mixing_holds},
                    {"min_absorption", i.min_absorption},
                    {"arrival_gap", i.arrival_gap},
                    {"estimated_tv", i.estimated_tv}});
  }
  return {{"n", r.n},
          {"d", r.d},
          {"m", r.m},
          {"constants",
           {{"R", r.constants.resistance},
            {"ET_over_1_plus_n_over_m2", r.constants.escape},
            {"HT_over_n_over_m_plus_log_n", r.constants.hitting},
            {"EHT_over_min_m_n_over_m_plus_log_n", r.constants.eht},
            {"absorption_times_m", r.constants.absorption}}},
          {"all_finite", r.all_finite},
          {"Q_norm_holds", r.q_norm_holds},
          {"Q_mixing_holds", r.q_mixing_holds},
          {"max_arrival_gap", r.max_arrival_gap},
          {"max_estimated_tv", r.max_estimated_tv},
          {"instances", inst}};
}

nlohmann::json to_json(const DriftReport& r) {
  return {{"max_growth", r.max_growth}, {"within", r.within}};
}

nlohmann::json to_json(const SslResult& r) {
  return {{"estimate", r.estimate},
          {"label", r.label},
          {"standard_error", r.standard_error},
          {"samples", r.samples},
          {"walk_steps", r.walk_steps},
          {"elfs_cost", r.elfs_cost},
          {"elfs_steps", r.elfs_steps},
          {"partial", r.partial},
          {"source", r.source}};
}

}  // namespace elfs
