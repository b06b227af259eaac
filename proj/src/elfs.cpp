#include "elfs/elfs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "elfs/edge_space.hpp"
#include "elfs/electric.hpp"
#include "elfs/errors.hpp"
#include "elfs/walk.hpp"

namespace elfs {
namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::vector<int> transient_vertices(const Graph& g) {
  std::vector<int> t;
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (!g.is_sink(x)) t.push_back(x);
  }
  return t;
}

// Elfs step distribution from x using column x of the interior Green function.
std::vector<double> green_step(const Graph& g, const RMat& green, int x) {
  const double r = green(x, x);
  std::vector<double> q(g.num_vertices(), 0.0);
  for (int y = 0; y < g.num_vertices(); ++y) {
    double acc = 0.0;
    for (const Neighbor& nb : g.neighbors(y)) {
      const double dv = green(y, x) - green(nb.vertex, x);
      acc += nb.w * dv * dv;
    }
    q[y] = acc / (2.0 * r);
  }
  return q;
}

double escape_time_from_green(const Graph& g, const RMat& green, int x) {
  double acc = 0.0;
  for (int y = 0; y < g.num_vertices(); ++y) acc += g.degree(y) * green(y, x) * green(y, x);
  return acc / green(x, x);
}

double hitting_time_from_green(const Graph& g, const RMat& green, int x) {
  double acc = 0.0;
  for (int y = 0; y < g.num_vertices(); ++y) acc += g.degree(y) * green(y, x);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------

double schedule_overlap_sq(const AngleSchedule& s, double initial_overlap_sq) {
  const double a = std::sqrt(std::clamp(initial_overlap_sq, 0.0, 1.0));
  Eigen::Vector2cd start(a, std::sqrt(std::max(0.0, 1.0 - a * a)));
  Eigen::Vector2cd psi = start;
  for (int l = 0; l < s.pairs(); ++l) {
    psi(0) *= std::polar(1.0, s.target_phase[l]);
    psi -= (1.0 - std::polar(1.0, -s.start_phase[l])) * start * start.dot(psi);
  }
  return std::norm(psi(0));
}

AngleSchedule fixed_point_angles(double min_overlap_sq, double eps) {
  if (!(min_overlap_sq > 0.0 && min_overlap_sq <= 1.0)) {
    throw ValidationError("overlap lower bound must lie in (0, 1], got " + fmt(min_overlap_sq));
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1), got " + fmt(eps));
  AngleSchedule s;
  s.error = eps;
  s.min_overlap_sq = min_overlap_sq;
  if (min_overlap_sq < 1.0) {
    // Smallest odd L with T_{1/L}(1/eps) <= 1/sqrt(1 - w).
    const double need = std::acosh(1.0 / eps) / std::acosh(1.0 / std::sqrt(1.0 - min_overlap_sq));
    int len = std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
    if (len % 2 == 0) ++len;
    s.length = len;
  }
  const int len = s.length, pairs = (len - 1) / 2;
  const double gamma = 1.0 / std::cosh(std::acosh(1.0 / eps) / len);
  const double root = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
  s.start_phase.resize(pairs);
  s.target_phase.resize(pairs);
  for (int j = 1; j <= pairs; ++j) {
    const double a = 2.0 * std::atan(1.0 / (std::tan(2.0 * M_PI * j / len) * root));
    s.start_phase[j - 1] = a;
    s.target_phase[pairs - j] = -a;
  }
  s.worst_sweep_overlap_sq = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double lam = min_overlap_sq + (1.0 - min_overlap_sq) * i / 99.0;
    s.worst_sweep_overlap_sq = std::min(s.worst_sweep_overlap_sq, schedule_overlap_sq(s, lam));
  }
  if (s.worst_sweep_overlap_sq < 1.0 - eps * eps - 1e-12) {
    throw ToleranceError("fixed-point schedule reaches only squared overlap " +
                         fmt(s.worst_sweep_overlap_sq));
  }
  return s;
}

FixedPointResult fixed_point_prepare(const Graph& g, double pbar, double eps) {
  const ElectricSolution sol = solve_electric(g);
  const WalkStats ws = walk_quantities(g);
  const double rd = sol.resistance * g.degree(g.source());
  if (!(pbar > 0.0) || pbar > (1.0 + 1e-12) / rd) {
    throw ValidationError("pbar = " + fmt(pbar) + " exceeds 1/(R_s d_s) = " + fmt(1.0 / rd));
  }
  FixedPointResult res;
  // |<phi_s|f>|^2 = 1 / (2 R_s d_s) >= pbar / 2.
  res.schedule = fixed_point_angles(pbar / 2.0, eps);

  const EdgeSpace es(g);
  const CMat pi = es.star_projector(), delta = es.sym_projector();
  const CMat id = CMat::Identity(es.dim(), es.dim());
  const CVec phi = es.star_state(g.source());
  res.target = es.flow_state(sol);
  res.bound = ws.escape_time / rd * std::log(1.0 / eps) / std::sqrt(pbar);

  const int pairs = res.schedule.pairs();
  CVec ideal = phi;
  for (int l = 0; l < pairs; ++l) {
    ideal -= (1.0 - std::polar(1.0, res.schedule.target_phase[l])) * res.target * res.target.dot(ideal);
    ideal -= (1.0 - std::polar(1.0, -res.schedule.start_phase[l])) * phi * phi.dot(ideal);
  }

  if (pairs == 0) {
    res.output = phi;
  } else {
    auto step = [&](int t) {
      const double theta = res.schedule.target_phase[t], varphi = res.schedule.start_phase[t];
      const CMat rot = id - (1.0 - std::polar(1.0, theta)) * (id - delta);
      const cplx start_phase = 1.0 - std::polar(1.0, -varphi);
      StreamStep st;
      st.apply = [rot, start_phase, &phi](const CVec& v) {
        CVec out = rot * v;
        out -= start_phase * phi * phi.dot(out);
        return out;
      };
      st.catalyst = [&pi, &delta](const CVec& v) { return effective_gap_catalyst(pi, delta, v); };
      st.public_part = [&pi](const CVec& v) { return CVec(v - pi * v); };
      const bool last = t == pairs - 1;
      st.done_part = [last](const CVec& v) { return last ? v : CVec(CVec::Zero(v.size())); };
      return st;
    };
    StreamOptions so;
    so.max_steps = pairs;
    so.tail_bound = 1e-12;
    const CompositionTrace tr = compose_streaming(step, phi, so);
    res.output = tr.outputs.back();
    res.complexity = tr.measured_complexity;
    res.formula_complexity = tr.formula_complexity;
    res.residual = tr.residual;
  }
  res.step_residual = (res.output - ideal).norm();
  if (res.step_residual > 1e-8) {
    throw ToleranceError("composed rotations deviate from the ideal sequence by " + fmt(res.step_residual));
  }
  res.overlap = std::abs(res.target.dot(res.output));
  return res;
}

FlowOverlap modified_flow_overlap(const Graph& g, double eta) {
  const ModifiedGraph mg = attach_source_stub(g, eta);
  const ElectricSolution sol = solve_electric(g), hat = solve_electric(mg.graph);
  const EdgeSpace es(g), es_hat(mg.graph);
  const CVec f = es.flow_state(sol), f_hat = es_hat.flow_state(hat);
  CVec embedded = CVec::Zero(es_hat.dim());
  for (int a = 0; a < es.dim(); ++a) embedded(mg.arc_embedding[a]) = f(a);
  FlowOverlap out;
  out.overlap_sq = std::norm(f_hat.dot(embedded));
  out.closed_form = sol.resistance / hat.resistance;
  if (std::abs(out.overlap_sq - out.closed_form) > 1e-10) {
    throw ToleranceError("flow overlap " + fmt(out.overlap_sq) + " differs from R_s / R_hat = " +
                         fmt(out.closed_form));
  }
  return out;
}

// ---------------------------------------------------------------------------

ExactElfResult exact_elf_prepare(const Graph& g, std::uint64_t seed, const ExactElfOptions& opts) {
  const WalkStats ws = walk_quantities(g);
  const double rd = opts.rd_estimate.value_or(ws.resistance * g.degree(g.source()));
  const double et_bar = opts.et_bar.value_or(ws.escape_time);
  if (!(rd > 0.0) || !(et_bar > 0.0)) throw ValidationError("estimates must be positive");
  ExactElfResult res{.graph = g};
  res.et_bar = et_bar;
  if (opts.modified) {
    res.eta = std::max(1.0, opts.eta.value_or(et_bar / rd));
    res.graph = attach_source_stub(g, res.eta).graph;
  }
  const Graph& h = res.graph;
  const EdgeSpace es(h);
  const Transducer v = walk_transducer(h);
  const CVec phi = es.star_state(h.source());
  const Transducer u = public_reflection(v, phi, "about the star state");
  res.target = es.flow_state(solve_electric(h));
  res.aa = zero_error_aa(u, v, phi, res.target, seed, opts.aa);
  res.alpha = res.aa.composed.alpha;
  res.complexity = res.aa.composed.complexity;
  res.ratio = res.complexity / std::sqrt(et_bar);
  res.fidelity = res.aa.composed.fidelity;
  res.output_state = res.aa.composed.marked_state;
  return res;
}

// ---------------------------------------------------------------------------

std::vector<double> elfs_step_distribution(const Graph& g, int x, std::optional<double> eta) {
  if (x < 0 || x >= g.num_vertices()) throw ValidationError("vertex out of range");
  if (g.is_sink(x)) throw ValidationError("vertex " + std::to_string(x) + " lies in the sink set");
  const Graph base = g.with_source(x);
  const Graph h = eta ? attach_source_stub(base, *eta).graph : base;
  const ElectricSolution sol = solve_electric(h);
  const CVec f = EdgeSpace(h).flow_state(sol);
  const int n = g.num_vertices();
  auto fold = [&](int y) { return y >= n ? x : y; };
  std::vector<double> measured(n, 0.0), formula(n, 0.0);
  for (int a = 0; a < h.num_arcs(); ++a) {
    const Arc arc = h.arc(a);
    measured[fold(arc.from)] += std::norm(f(a));
    formula[fold(arc.from)] += sol.flow[a] * sol.flow[a] / arc.w / (2.0 * sol.resistance);
  }
  for (int y = 0; y < n; ++y) {
    if (std::abs(measured[y] - formula[y]) > 1e-12) {
      throw ToleranceError("flow-state statistics disagree with the transition formula at vertex " +
                           std::to_string(y));
    }
  }
  return formula;
}

ElfsChain elfs_chain(const Graph& g, const ElfsChainOptions& opts) {
  const int n = g.num_vertices();
  const RMat green = interior_green(g);
  ElfsChain c;
  c.n = n;
  c.sinks = g.sinks();
  c.step = RMat::Zero(n, n);
  c.resistance = RVec::Zero(n);
  c.hitting_time = RVec::Zero(n);
  c.escape_time = RVec::Zero(n);
  c.self_loop = RVec::Zero(n);
  if (opts.modified && !opts.eta.empty() && static_cast<int>(opts.eta.size()) != n) {
    throw ValidationError("need one stub parameter per vertex");
  }
  const std::vector<int> t = transient_vertices(g);
  for (int x : t) {
    c.resistance(x) = green(x, x);
    c.hitting_time(x) = hitting_time_from_green(g, green, x);
    c.escape_time(x) = escape_time_from_green(g, green, x);
    const std::vector<double> q = green_step(g, green, x);
    double loop = 0.0;
    if (opts.modified) {
      const double rd = c.resistance(x) * g.degree(x);
      const double eta = opts.eta.empty() ? c.escape_time(x) / rd : opts.eta[x];
      if (!(eta >= 1.0)) throw ValidationError("stub parameter below 1 at vertex " + std::to_string(x));
      loop = 1.0 / (1.0 + eta * rd);
    }
    c.self_loop(x) = loop;
    for (int y = 0; y < n; ++y) c.step(x, y) = (1.0 - loop) * q[y];
    c.step(x, x) += loop;
  }
  for (int m : c.sinks) c.step(m, m) = 1.0;
  for (int x = 0; x < n; ++x) c.row_sum_defect = std::max(c.row_sum_defect, std::abs(c.step.row(x).sum() - 1.0));

  const int k = static_cast<int>(t.size());
  RMat a = RMat::Identity(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) -= c.step(t[i], t[j]);
  }
  const RMat nk = a.partialPivLu().solve(RMat::Identity(k, k));
  c.visits = RMat::Zero(n, n);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) c.visits(t[i], t[j]) = nk(i, j);
  }
  c.eht = c.visits.rowwise().sum();
  c.arrival = RMat::Zero(n, static_cast<int>(c.sinks.size()));
  for (std::size_t j = 0; j < c.sinks.size(); ++j) {
    const int m = c.sinks[j];
    for (int i = 0; i < k; ++i) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) acc += nk(i, l) * c.step(t[l], m);
      c.arrival(t[i], j) = acc;
    }
    c.arrival(m, j) = 1.0;
  }
  double max_eht = 0.0;
  for (int x : t) {
    if (!std::isfinite(c.eht(x)) || c.eht(x) < 1.0 - 1e-9) {
      throw ToleranceError("elfs chain is not absorbing from vertex " + std::to_string(x));
    }
    max_eht = std::max(max_eht, c.eht(x));
  }
  // Collatz-Wielandt: Q h = h - 1 <= (1 - 1/max h) h.
  c.spectral_radius_bound = max_eht > 0 ? 1.0 - 1.0 / max_eht : 0.0;
  return c;
}

// ---------------------------------------------------------------------------

ElfsSampler::ElfsSampler(const Graph& g) : g_(g), green_(interior_green(g)) {
  walk_cumulative_.resize(g_.num_vertices());
  for (int x = 0; x < g_.num_vertices(); ++x) {
    double acc = 0.0;
    for (const Neighbor& nb : g_.neighbors(x)) {
      acc += nb.w / g_.degree(x);
      walk_cumulative_[x].push_back(acc);
    }
    if (!walk_cumulative_[x].empty()) walk_cumulative_[x].back() = 1.0;
  }
}

const ElfsSampler::Table& ElfsSampler::table(int x) const {
  auto it = tables_.find(x);
  if (it != tables_.end()) return it->second;
  if (g_.is_sink(x)) throw ValidationError("no elfs step from sink vertex " + std::to_string(x));
  const int n = g_.num_vertices();
  Table tb;
  tb.step = green_step(g_, green_, x);
  const double r = green_(x, x);
  double acc = 0.0;
  for (int a = 0; a < g_.num_arcs(); ++a) {
    const Arc arc = g_.arc(a);
    const double dv = green_(arc.from, x) - green_(arc.to, x);
    acc += arc.w * dv * dv / (2.0 * r);
    tb.arc_cumulative.push_back(acc);
  }

  // Stop-at-y walk coupling: the leaving-rate potential g solves L g = e_x - q off M.
  RVec demand = -Eigen::Map<const RVec>(tb.step.data(), n);
  demand(x) += 1.0;
  const RVec pot = green_ * demand;
  const double scale = pot.cwiseAbs().maxCoeff() + 1.0;
  tb.stop.assign(n, 1.0);
  for (int y = 0; y < n; ++y) {
    if (pot(y) < -1e-10 * scale) {
      throw ToleranceError("elfs step from " + std::to_string(x) + " is not a stopped walk at vertex " +
                           std::to_string(y));
    }
    double arrive = 0.0;  // expected arrivals at y
    for (const Neighbor& nb : g_.neighbors(y)) arrive += nb.w * std::max(0.0, pot(nb.vertex));
    const double visits = (y == x ? 1.0 : 0.0) + arrive;
    if (g_.is_sink(y)) {
      if (std::abs(visits - tb.step[y]) > 1e-9) {
        throw ToleranceError("walk arrivals at sink " + std::to_string(y) + " differ from the elfs step");
      }
      continue;
    }
    tb.mean_steps += g_.degree(y) * std::max(0.0, pot(y));
    tb.stop[y] = visits > 0.0 ? std::clamp(tb.step[y] / visits, 0.0, 1.0) : 1.0;
  }
  return tables_.emplace(x, std::move(tb)).first->second;
}

int ElfsSampler::sample_arc(int x, Rng& rng) const {
  const auto& cum = table(x).arc_cumulative;
  // Scaling by the total keeps u below the last positive entry.
  const double u = uniform01(rng) * cum.back();
  return static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
}

double ElfsSampler::stop_probability(int x, int y) const { return table(x).stop[y]; }

const std::vector<double>& ElfsSampler::step_distribution(int x) const { return table(x).step; }

double ElfsSampler::coupled_mean_steps(int x) const { return table(x).mean_steps; }

int ElfsSampler::walk_step(int y, Rng& rng) const {
  const auto& cum = walk_cumulative_[y];
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const std::size_t i = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  return g_.neighbors(y)[i].vertex;
}

ElfsTrace simulate_elfs(const ElfsSampler& sampler, std::uint64_t seed, const ElfsOptions& opts) {
  const Graph& g = sampler.graph();
  Rng rng = make_rng(seed);
  ElfsTrace tr;
  tr.seed = seed;
  tr.coupled = opts.coupled;
  int y = g.source();
  tr.sources.push_back(y);
  long time = 0;
  if (opts.coupled && opts.record_walk) tr.walk.push_back(y);
  while (!g.is_sink(y)) {
    if (tr.rho >= opts.max_elfs_steps) {
      throw BudgetError("elfs process exceeded " + std::to_string(opts.max_elfs_steps) + " steps");
    }
    if (!opts.coupled) {
      const int a = sampler.sample_arc(y, rng);
      tr.arcs.push_back(a);
      y = g.arc(a).from;
    } else {
      const int from = y;
      int cur = y;
      while (uniform01(rng) >= sampler.stop_probability(from, cur)) {
        cur = sampler.walk_step(cur, rng);
        if (++time > opts.walk_step_budget) {
          throw BudgetError("coupled walk exceeded " + std::to_string(opts.walk_step_budget) + " steps");
        }
        if (opts.record_walk) tr.walk.push_back(cur);
      }
      tr.nu.push_back(time);
      y = cur;
    }
    tr.sources.push_back(y);
    ++tr.rho;
  }
  return tr;
}

ElfsTrace simulate_elfs(const Graph& g, std::uint64_t seed, const ElfsOptions& opts) {
  return simulate_elfs(ElfsSampler(g), seed, opts);
}

CouplingReport coupling_identities(const Graph& g, int samples, std::uint64_t seed) {
  if (samples < 2) throw ValidationError("need at least two samples");
  const ElfsChain chain = elfs_chain(g);
  const int s = g.source();
  CouplingReport r;
  for (int y = 0; y < g.num_vertices(); ++y) r.sum_et += chain.visits(s, y) * chain.escape_time(y);
  r.twice_ht = 2.0 * chain.hitting_time(s);
  r.identity_gap = std::abs(r.sum_et - r.twice_ht);
  r.exact_ok = r.identity_gap <= 1e-8 * std::max(1.0, r.twice_ht);

  const ElfsSampler sampler(g);
  ElfsOptions opts;
  opts.coupled = true;
  opts.record_walk = false;
  double s1 = 0, s2 = 0, t1 = 0, t2 = 0, r1 = 0, r2 = 0;
  for (int i = 0; i < samples; ++i) {
    const ElfsTrace tr = simulate_elfs(sampler, split_seed(seed, static_cast<std::uint64_t>(i)), opts);
    const double nu1 = double(tr.nu.front()), tau = double(tr.nu.back()), rho = double(tr.rho);
    s1 += nu1;
    s2 += nu1 * nu1;
    t1 += tau;
    t2 += tau * tau;
    r1 += rho;
    r2 += rho * rho;
  }
  const double k = samples;
  auto se = [k](double a, double b) { return std::sqrt(std::max(0.0, (b / k - (a / k) * (a / k)) / (k - 1))); };
  r.samples = samples;
  r.nu1_mean = s1 / k;
  r.nu1_se = se(s1, s2);
  r.tau_mean = t1 / k;
  r.tau_se = se(t1, t2);
  r.rho_mean = r1 / k;
  r.rho_se = se(r1, r2);
  r.nu1_expected = chain.escape_time(s) / 2.0;
  const double diff = r.nu1_mean - r.nu1_expected;
  r.nu1_z = r.nu1_se > 0 ? diff / r.nu1_se : (std::abs(diff) < 1e-12 ? 0.0 : INFINITY);
  r.monte_carlo_ok = std::abs(r.nu1_z) <= 4.0;
  return r;
}

// ---------------------------------------------------------------------------

double chain_path_probability(const ElfsChain& chain, const std::vector<int>& path) {
  double p = 1.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) p *= chain.step(path[i], path[i + 1]);
  return p;
}

QuantumElfsResult quantum_elfs_process(const Graph& g, const QuantumElfsOptions& opts) {
  const int n = g.num_vertices();
  if (n > 5) throw ValidationError("quantum elfs simulation is limited to n <= 5, got " + std::to_string(n));
  if (opts.depth_cap < 1 || opts.depth_cap > 3) throw ValidationError("depth cap must lie in [1, 3]");

  const ElfsChain plain = elfs_chain(g);
  QuantumElfsResult res;
  res.eta.assign(n, 0.0);
  res.step_complexity.assign(n, 0.0);
  std::vector<std::vector<double>> dist(n);
  Rng perturb = make_rng(opts.seed, 0x5eed);
  for (int x : transient_vertices(g)) {
    const double rd = plain.resistance(x) * g.degree(x);
    double rd_used = rd;
    if (opts.mode == ElfsParameterMode::estimated) {
      rd_used *= 1.0 + opts.perturbation * (2.0 * uniform01(perturb) - 1.0);
    }
    ExactElfOptions eo;
    eo.modified = opts.modified;
    eo.et_bar = plain.escape_time(x);
    eo.rd_estimate = rd_used;
    eo.aa = opts.aa;
    const ExactElfResult r = exact_elf_prepare(g.with_source(x), split_seed(opts.seed, x), eo);
    res.eta[x] = r.eta;
    res.step_complexity[x] = r.complexity;
    res.min_fidelity = std::min(res.min_fidelity, r.fidelity);
    // Deferred measurement: copy the first register of the prepared state.
    dist[x].assign(n, 0.0);
    double total = 0.0;
    for (int a = 0; a < r.graph.num_arcs(); ++a) {
      const int from = r.graph.arc(a).from;
      const double p = r.output_state(a, a).real();
      dist[x][from >= n ? x : from] += p;
      total += p;
    }
    for (double& p : dist[x]) p /= total;
  }

  struct Branch {
    std::vector<int> path;
    double p;
  };
  std::vector<Branch> frontier{{{g.source()}, 1.0}};
  for (int t = 0; t < opts.depth_cap && !frontier.empty(); ++t) {
    double mass = 0.0, work = 0.0, ref = 0.0;
    for (const Branch& b : frontier) {
      mass += b.p;
      work += b.p * res.step_complexity[b.path.back()];
      ref += b.p * std::sqrt(plain.escape_time(b.path.back()));
    }
    // Counter composition: W_0 + sum_{t >= 1} ||psi_{t,0}||^2 (1 + W_t).
    res.complexity += work + (t > 0 ? mass : 0.0);
    res.reference += ref;
    std::vector<Branch> next;
    for (const Branch& b : frontier) {
      const int y = b.path.back();
      for (int z = 0; z < n; ++z) {
        const double p = b.p * dist[y][z];
        if (p <= 0.0) continue;
        std::vector<int> path = b.path;
        path.push_back(z);
        if (g.is_sink(z)) {
          res.paths.push_back({std::move(path), p, true});
        } else {
          next.push_back({std::move(path), p});
        }
      }
    }
    frontier = std::move(next);
  }
  for (Branch& b : frontier) {
    res.remaining_mass += b.p;
    res.paths.push_back({std::move(b.path), b.p, false});
  }
  res.ratio = res.reference > 0 ? res.complexity / res.reference : 0.0;

  ElfsChainOptions co;
  co.modified = opts.modified;
  if (opts.modified) {
    co.eta = res.eta;
    for (int m : g.sinks()) co.eta[m] = 1.0;
  }
  const ElfsChain chain = elfs_chain(g, co);
  res.arrival.assign(g.sinks().size(), 0.0);
  for (const ElfsPath& p : res.paths) {
    res.chain_deviation = std::max(res.chain_deviation, std::abs(p.probability - chain_path_probability(chain, p.vertices)));
    if (p.absorbed) {
      const auto it = std::find(g.sinks().begin(), g.sinks().end(), p.vertices.back());
      res.arrival[it - g.sinks().begin()] += p.probability;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ElfsChain& c, const Graph& g) {
  nlohmann::json eht = nlohmann::json::object(), arrival = nlohmann::json::object();
  for (int x = 0; x < c.n; ++x) {
    if (g.is_sink(x)) continue;
    eht[std::to_string(x)] = c.eht(x);
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t j = 0; j < c.sinks.size(); ++j) row[std::to_string(c.sinks[j])] = c.arrival(x, j);
    arrival[std::to_string(x)] = row;
  }
  double sum_et = 0.0;
  for (int y = 0; y < c.n; ++y) sum_et += c.visits(g.source(), y) * c.escape_time(y);
  return {{"EHT", eht}, {"arrival", arrival}, {"source", g.source()}, {"sum_ET", sum_et},
          {"HT", c.hitting_time(g.source())}};
}

nlohmann::json to_json(const CouplingReport& r) {
  return {{"sum_ET", r.sum_et},       {"twice_HT", r.twice_ht}, {"identity_gap", r.identity_gap},
          {"samples", r.samples},     {"nu1_mean", r.nu1_mean}, {"nu1_se", r.nu1_se},
          {"nu1_expected", r.nu1_expected}, {"nu1_z", r.nu1_z}, {"tau_mean", r.tau_mean},
          {"rho_mean", r.rho_mean},   {"exact_ok", r.exact_ok}, {"monte_carlo_ok", r.monte_carlo_ok}};
}

nlohmann::json to_json(const FixedPointResult& r) {
  return {{"L", r.schedule.length}, {"pairs", r.schedule.pairs()}, {"overlap", r.overlap},
          {"W", r.complexity},      {"bound", r.bound},               {"residual", r.residual}};
}

nlohmann::json to_json(const QuantumElfsResult& r) {
  nlohmann::json paths = nlohmann::json::array();
  for (const ElfsPath& p : r.paths) {
    paths.push_back({{"path", p.vertices}, {"probability", p.probability}, {"absorbed", p.absorbed}});
  }
  return {{"paths", paths},           {"remaining_mass", r.remaining_mass}, {"W", r.complexity},
          {"reference", r.reference}, {"ratio", r.ratio},                   {"chain_deviation", r.chain_deviation},
          {"arrival", r.arrival},     {"eta", r.eta}};
}

}  // namespace elfs
