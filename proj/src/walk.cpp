#include "elfs/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "elfs/electric.hpp"

namespace elfs {

WalkStats walk_quantities(const Graph& g) {
  const ElectricSolution sol = solve_electric(g);
  WalkStats st;
  st.resistance = sol.resistance;
  st.escape_probability = 1.0 / (sol.resistance * g.degree(g.source()));
  double ht = 0.0, et = 0.0;
  for (int x = 0; x < g.num_vertices(); ++x) {
    ht += sol.voltage(x) * g.degree(x);
    et += sol.voltage(x) * sol.voltage(x) * g.degree(x);
  }
  st.hitting_time = ht;
  st.escape_time = et / sol.resistance;
  st.commute_time = sol.resistance * g.total_weight();
  return st;
}

WalkSampler::WalkSampler(const Graph& g) : g_(&g), cumulative_(g.num_vertices()) {
  for (int x = 0; x < g.num_vertices(); ++x) {
    double acc = 0.0;
    for (const Neighbor& nb : g.neighbors(x)) {
      acc += nb.w;
      cumulative_[x].push_back(acc);
    }
  }
}

int WalkSampler::step(int x, Rng& rng) const {
  const auto& cum = cumulative_[x];
  const double u = uniform01(rng) * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const auto k = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  return g_->neighbors(x)[k].vertex;
}

WalkTrace simulate_walk(const Graph& g, std::uint64_t seed, const WalkOptions& opts) {
  return simulate_walk(WalkSampler(g), seed, opts);
}

WalkTrace simulate_walk(const WalkSampler& sampler, std::uint64_t seed, const WalkOptions& opts) {
  const Graph& g = sampler.graph();
  Rng rng = make_rng(seed);
  WalkTrace tr;
  tr.seed = seed;
  int x = g.source();
  long t = 0;
  long last_at_source = 0;
  if (opts.record_path) tr.path.push_back(x);
  auto overrun = [&](const char* phase) {
    throw WalkBudgetError("walk exceeded step budget " + std::to_string(opts.step_budget) +
                              " while " + phase + "; partial trace has " +
                              std::to_string(t) + " steps",
                          tr);
  };
  while (!g.is_sink(x)) {
    if (t >= opts.step_budget) overrun("searching for the sink set");
    x = sampler.step(x, rng);
    ++t;
    if (opts.record_path) tr.path.push_back(x);
    if (x == g.source()) last_at_source = t;
  }
  tr.tau = t;
  tr.sigma = last_at_source + 1;
  if (opts.commute) {
    do {
      if (t >= opts.step_budget) overrun("returning to the source");
      x = sampler.step(x, rng);
      ++t;
      if (opts.record_path) tr.path.push_back(x);
    } while (x != g.source());
    tr.kappa = t;
  }
  return tr;
}

RMat transition_matrix(const Graph& g) {
  const int n = g.num_vertices();
  RMat p = RMat::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (const Neighbor& nb : g.neighbors(x)) p(x, nb.vertex) = nb.w / g.degree(x);
  }
  return p;
}

RMat transient_block(const Graph& g, std::vector<int>* labels) {
  std::vector<int> idx(g.num_vertices(), -1), interior;
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (!g.is_sink(x)) {
      idx[x] = static_cast<int>(interior.size());
      interior.push_back(x);
    }
  }
  const int k = static_cast<int>(interior.size());
  RMat q = RMat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    const int x = interior[i];
    for (const Neighbor& nb : g.neighbors(x)) {
      if (idx[nb.vertex] >= 0) q(i, idx[nb.vertex]) = nb.w / g.degree(x);
    }
  }
  if (labels) *labels = std::move(interior);
  return q;
}

FundamentalStats fundamental_matrix_stats(const Graph& g, SeriesMode mode, int t_max) {
  FundamentalStats fs;
  fs.stats = walk_quantities(g);
  const ElectricSolution sol = solve_electric(g);
  std::vector<int> labels;
  const RMat q = transient_block(g, &labels);
  const int k = static_cast<int>(labels.size());
  const int si = static_cast<int>(std::find(labels.begin(), labels.end(), g.source()) - labels.begin());

  // row: sum_t Q^t restricted to row s; weighted: sum_t (t+1) Q^t_ss.
  RVec row = RVec::Zero(k);
  double weighted_return = 0.0;
  if (mode == SeriesMode::exact_inverse) {
    const RMat n_mat = (RMat::Identity(k, k) - q).partialPivLu().inverse();
    row = n_mat.row(si).transpose();
    weighted_return = (n_mat * n_mat)(si, si);
  } else {
    if (t_max < 0) throw ValidationError("truncated series needs t_max >= 0");
    RVec qt = RVec::Zero(k);  // row s of Q^t
    qt(si) = 1.0;
    for (int t = 0; t <= t_max; ++t) {
      row += qt;
      weighted_return += (t + 1) * qt(si);
      qt = q.transpose() * qt;
    }
    fs.series_terms = t_max + 1;
  }
  fs.visits.assign(g.num_vertices(), 0.0);
  fs.visits_voltage.assign(g.num_vertices(), 0.0);
  for (int i = 0; i < k; ++i) fs.visits[labels[i]] = row(i);
  for (int x = 0; x < g.num_vertices(); ++x) fs.visits_voltage[x] = g.degree(x) * sol.voltage(x);
  fs.hitting_time = row.sum();
  fs.return_sum = row(si);
  if (g.is_regular()) {
    fs.series_escape_time = weighted_return / (g.degree(g.source()) * sol.resistance);
  }
  return fs;
}

double spectral_gap(const Graph& g) {
  // P is similar to the symmetric D^{-1/2} A D^{-1/2}.
  const int n = g.num_vertices();
  RMat sym = RMat::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const double v = e.w / std::sqrt(g.degree(e.u) * g.degree(e.v));
    sym(e.u, e.v) = v;
    sym(e.v, e.u) = v;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
  RVec lam = es.eigenvalues();  // ascending; lam(n - 1) = 1
  double second = 0.0;
  for (int i = 0; i < n - 1; ++i) second = std::max(second, std::abs(lam(i)));
  return 1.0 - second;
}

QBoundReport q_matrix_bounds(const Graph& g, int t_max) {
  QBoundReport rep;
  rep.delta = spectral_gap(g);
  const RMat q = transient_block(g);
  rep.q_norm = op_norm(q);
  const double n = g.num_vertices();
  const double m = static_cast<double>(g.sinks().size());
  rep.q_norm_bound = 1.0 - rep.delta * m / n;
  rep.norm_bound_holds = rep.q_norm <= rep.q_norm_bound + 1e-12;

  rep.worst_mixing_slack = std::numeric_limits<double>::infinity();
  RMat qt = RMat::Identity(q.rows(), q.cols());
  for (int t = 0; t < t_max; ++t) {
    const double bound = 1.0 / n + std::pow(1.0 - rep.delta, t);
    rep.worst_mixing_slack = std::min(rep.worst_mixing_slack, bound - qt.maxCoeff());
    qt = qt * q;
  }
  rep.mixing_bound_holds = rep.worst_mixing_slack >= -1e-12;
  return rep;
}

nlohmann::json to_json(const WalkStats& s) {
  return {{"R_s", s.resistance},
          {"p", s.escape_probability},
          {"HT", s.hitting_time},
          {"ET", s.escape_time},
          {"CT", s.commute_time}};
}

}  // namespace elfs
