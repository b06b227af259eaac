#include "elfs/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "elfs/edge_space.hpp"
#include "elfs/electric.hpp"
#include "elfs/errors.hpp"
#include "elfs/rng.hpp"

namespace elfs {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Eigenphases of R on span{start, target} against ±2 theta.
double rotation_phase_error(const RotationModel& m) {
  CVec second = m.target - m.start * m.start.dot(m.target);
  CMat q;
  if (second.norm() < 1e-12) {
    q = m.start;
  } else {
    q.resize(m.start.size(), 2);
    q << m.start, second.normalized();
  }
  const CMat r2 = q.adjoint() * m.rotation * q;
  Eigen::ComplexEigenSolver<CMat> es(r2);
  double err = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ph = std::arg(es.eigenvalues()(i));
    err = std::max(err, std::min(std::abs(ph - 2 * m.theta), std::abs(ph + 2 * m.theta)));
  }
  return err;
}

RotationModel finish_model(Transducer s, CVec start, CVec target) {
  const Eigen::Index d = s.dim();
  const CMat id = CMat::Identity(d, d);
  const CMat about_start = id - 2.0 * start * start.adjoint();
  RotationModel m{std::move(s), start, target, {}, {}, 0.0, 0.0, 0.0};
  m.u_prime = about_start * m.reflection.unitary();
  m.rotation = about_start * (2.0 * target * target.adjoint() - id);
  m.sin_theta = std::min(1.0, std::abs(target.dot(start)));
  m.theta = std::asin(m.sin_theta);
  m.phase_error = rotation_phase_error(m);
  return m;
}

std::vector<double> sample_readouts(const std::vector<double>& dist, long range, int count, Rng& rng) {
  std::discrete_distribution<long> pick(dist.begin(), dist.end());
  std::vector<double> out(count);
  for (double& x : out) x = std::sin(counter_to_theta(pick(rng), range));
  return out;
}

double resistance_degree(const Graph& g) {
  return solve_electric(g).resistance * g.degree(g.source());
}

}  // namespace

RotationModel rotation_model(const Graph& g) {
  const EdgeSpace es(g);
  const CVec phi = es.star_state(g.source());
  CVec f = es.flow_state(solve_electric(g));
  if (f.dot(phi).real() < 0) f = -f;
  return finish_model(walk_transducer(g), phi, f);
}

RotationModel rotation_model(const CMat& pi, const CMat& delta, const CVec& psi) {
  if ((pi * psi).norm() > 1e-10 * std::max(1.0, psi.norm())) {
    throw ValidationError("input state is not in ker(Pi)");
  }
  const Eigen::Index d = pi.rows();
  const CMat id = CMat::Identity(d, d);
  const CVec proj = invariant_projector(pi, delta) * psi;
  if (proj.norm() < 1e-12) throw ValidationError("input state has no component in ker(Pi) ∩ ker(Delta)");
  Transducer s((2.0 * pi - id) * (2.0 * delta - id), projector_kernel_basis(pi), "reflection pair");
  return finish_model(std::move(s), psi, proj.normalized());
}

namespace {

PowerState run_power_state(const RotationModel& m, long range, bool with_degraded) {
  if (range < 1 || range > kMaxCounterRange) {
    throw ValidationError("counter range T = " + std::to_string(range) + " outside [1, " +
                          std::to_string(kMaxCounterRange) + "]");
  }
  const Eigen::Index d = m.reflection.dim();
  PowerState ps;
  ps.range = range;
  CVec psi00(d * range);
  for (long c = 0; c < range; ++c) psi00.segment(c * d, d) = m.start / std::sqrt(double(range));
  if (range == 1) {
    ps.slices = psi00;
    ps.degraded = psi00;
    return ps;
  }
  const CMat& up = m.u_prime;
  const CMat& cat = m.reflection.catalyst_map();
  const CMat pub = m.reflection.public_projector();
  auto slices_above = [&, d](const CMat& op, const CVec& v, long t, bool keep) {
    CVec out = keep ? v : CVec(CVec::Zero(v.size()));
    for (long c = t + 1; c < range; ++c) out.segment(c * d, d) = op * v.segment(c * d, d);
    return out;
  };
  auto step = [&](int t) {
    return StreamStep{[&, t](const CVec& v) { return slices_above(up, v, t, true); },
                      [&, t](const CVec& v) { return slices_above(cat, v, t, false); },
                      [&, d](const CVec& v) {
                        CVec out(v.size());
                        for (long c = 0; c < range; ++c) out.segment(c * d, d) = pub * v.segment(c * d, d);
                        return out;
                      },
                      [&, t, d](const CVec& v) {
                        CVec out = CVec::Zero(v.size());
                        out.head((t + 2) * d) = v.head((t + 2) * d);
                        return out;
                      }};
  };
  StreamOptions opts;
  opts.max_steps = static_cast<int>(range - 1);
  const CompositionTrace tr = compose_streaming(step, psi00, opts);
  // The composition counter equals max(1, t) on slice t, so it is uncomputed from the
  // power register for free; the outputs then add up to one state.
  CVec state = CVec::Zero(d * range);
  for (const CVec& o : tr.outputs) state += o;
  ps.slices = Eigen::Map<CMat>(state.data(), d, range);
  ps.complexity = tr.measured_complexity;
  ps.residual = tr.residual;
  ps.calls = tr.steps;
  ps.degraded = ps.slices;
  if (with_degraded && ps.complexity > 0) {
    // Scale c with 2 (1 - c) sqrt(W) = 1/10.
    ps.catalyst_scale = std::max(0.0, 1.0 - 1.0 / (20.0 * std::sqrt(ps.complexity)));
    StreamOptions dopts = opts;
    dopts.catalyst_scale = ps.catalyst_scale;
    const CompositionTrace dt = compose_streaming(step, psi00, dopts);
    CVec deg = CVec::Zero(d * range);
    for (const CVec& o : dt.degraded_outputs) deg += o;
    deg.normalize();
    ps.degraded = Eigen::Map<CMat>(deg.data(), d, range);
    ps.degraded_distance = (deg - state).norm();
  }
  return ps;
}

}  // namespace

PowerState controlled_power_state(const RotationModel& model, long range) {
  return run_power_state(model, range, true);
}

PowerState controlled_power_state(const Graph& g, long range) {
  return controlled_power_state(rotation_model(g), range);
}

std::vector<double> qpe_distribution(const CMat& slices) {
  const Eigen::Index t = slices.cols();
  CMat f(t, t);
  for (Eigen::Index c = 0; c < t; ++c) {
    for (Eigen::Index k = 0; k < t; ++k) {
      f(c, k) = std::polar(1.0 / std::sqrt(double(t)), -2.0 * kPi * double((c * k) % t) / double(t));
    }
  }
  const CMat a = slices * f;
  std::vector<double> p(t);
  for (Eigen::Index k = 0; k < t; ++k) p[k] = a.col(k).squaredNorm();
  return p;
}

double counter_to_theta(long k, long range) {
  const double phi = double(k) / double(range);
  return kPi * std::min(phi, 1.0 - phi);
}

const std::vector<double>& QpeCache::get(const std::string& key, long range, QpeMode mode,
                                         const RotationModel& m) {
  auto& table = mode == QpeMode::exact ? exact_ : degraded_;
  auto it = table.find({key, range});
  if (it != table.end()) return it->second;
  const PowerState ps = run_power_state(m, range, mode == QpeMode::degraded);
  return table[{key, range}] = qpe_distribution(mode == QpeMode::exact ? ps.slices : ps.degraded);
}

const std::vector<double>& QpeCache::get(const Graph& g, long range, QpeMode mode) {
  const std::string key = serialize_graph(g);
  auto& table = mode == QpeMode::exact ? exact_ : degraded_;
  auto it = table.find({key, range});
  if (it != table.end()) return it->second;
  return get(key, range, mode, rotation_model(g));
}

namespace {

EstimateRecord readout(const std::vector<double>& dist, long range, double tau, std::uint64_t seed,
                       const QpeOptions& opts) {
  Rng rng = make_rng(seed);
  EstimateRecord r;
  r.quantity = "sin_theta";
  r.range = range;
  r.tau = tau;
  const long per = static_cast<long>(std::ceil(tau * double(range)));
  if (opts.median_groups <= 0) {
    std::discrete_distribution<long> pick(dist.begin(), dist.end());
    r.counter_value = pick(rng);
    r.sin_theta = std::sin(counter_to_theta(r.counter_value, range));
    r.walk_steps = per;
  } else {
    std::vector<double> means;
    for (int g = 0; g < opts.median_groups; ++g) {
      const auto xs = sample_readouts(dist, range, opts.group_size, rng);
      double s = 0;
      for (double x : xs) s += x;
      means.push_back(s / double(xs.size()));
    }
    std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
    r.sin_theta = means[means.size() / 2];
    r.counter_value = -1;
    r.walk_steps = per * opts.median_groups * opts.group_size;
  }
  r.estimate = r.sin_theta;
  return r;
}

const std::vector<double>& distribution_for(const Graph& g, long range, QpeMode mode, QpeCache* cache,
                                            QpeCache& local) {
  return (cache ? *cache : local).get(g, range, mode);
}

}  // namespace

EstimateRecord qpe_estimate(const Graph& g, double tau, long range, std::uint64_t seed,
                            const QpeOptions& opts, QpeCache* cache) {
  QpeCache local;
  const auto& dist = distribution_for(g, range, opts.mode, cache, local);
  EstimateRecord r = readout(dist, range, tau, seed, opts);
  r.exact = 1.0 / std::sqrt(2.0 * resistance_degree(g));
  r.success = std::abs(r.estimate - r.exact) <= 2.0 * kPi / double(range);
  r.iterations = 1;
  return r;
}

long known_estimate_range(double et_bar, double eps) {
  if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0, 1)");
  // R_sigma d_sigma = 1 + eta R_s d_s <= 1 + 2 ET_bar under the contract on p.
  return static_cast<long>(std::ceil(kKnownRangeConstant * std::sqrt(1.0 + 2.0 * et_bar) / eps));
}

EstimateRecord estimate_known(const Graph& g, double et_bar, double p, double eps, std::uint64_t seed,
                              QpeCache* cache, const QpeOptions& opts) {
  if (!(p > 0) || !(et_bar > 0)) throw ValidationError("need ET_bar > 0 and p > 0");
  const double eta = et_bar / p;
  const ModifiedGraph mg = attach_source_stub(g, eta);
  const long range = known_estimate_range(et_bar, eps);
  QpeCache local;
  const auto& dist = distribution_for(mg.graph, range, opts.mode, cache, local);
  EstimateRecord r = readout(dist, range, 3.0, seed, opts);
  const double s2 = r.sin_theta * r.sin_theta;
  const double p_hat = s2 > 0 ? 1.0 / (2.0 * s2) : std::numeric_limits<double>::infinity();
  r.quantity = "resistance_times_degree";
  r.estimate = (p_hat - 1.0) / eta;
  r.exact = resistance_degree(g);
  r.eta = eta;
  r.iterations = 1;
  r.success = std::abs(r.estimate - r.exact) <= eps * r.exact;
  return r;
}

long search_range(double et_bar) {
  return static_cast<long>(std::ceil(kSearchRangeConstant * std::sqrt(et_bar)));
}

int binary_search_iteration_cap(double et_bar) {
  return static_cast<int>(std::ceil(std::log2(std::max(1.0, et_bar)))) + 2;
}

EstimateRecord binary_search_estimate(const Graph& g, double et_bar, std::uint64_t seed, QpeCache* cache) {
  if (!(et_bar >= 1.0)) throw ValidationError("ET_bar must be at least 1");
  const long range = search_range(et_bar);
  const double threshold = 1.0 / (2.0 * std::sqrt(et_bar));
  const int cap = binary_search_iteration_cap(et_bar);
  QpeCache local;
  EstimateRecord r;
  r.quantity = "inverse_resistance_times_degree";
  r.range = range;
  r.tau = 3.0;
  double p = 1.0;
  for (int it = 1;; ++it) {
    if (it > cap) {
      throw BudgetError("binary search exceeded " + std::to_string(cap) + " iterations");
    }
    const ModifiedGraph mg = attach_source_stub(g, p * et_bar);
    const auto& dist = distribution_for(mg.graph, range, QpeMode::exact, cache, local);
    const EstimateRecord q = readout(dist, range, 3.0, split_seed(seed, it), {});
    r.walk_steps += q.walk_steps;
    r.iterations = it;
    r.sin_theta = q.sin_theta;
    r.counter_value = q.counter_value;
    r.eta = p * et_bar;
    const double a = std::sqrt(2.0) * q.sin_theta;
    if (a <= threshold && p >= 2.0 / et_bar) {
      p /= 2.0;
      continue;
    }
    break;
  }
  r.estimate = p;
  r.exact = 1.0 / resistance_degree(g);
  const double prod = p / r.exact;
  r.success = prod >= 7.0 / 18.0 && prod <= 16.0;
  return r;
}

LowerBoundRecord lower_bound_fixture(double delta) {
  if (!(delta > 0 && delta < 0.5)) throw ValidationError("need 0 < delta < 1/2");
  LowerBoundRecord r{fixtures::lower_bound(delta), fixtures::lower_bound(-delta)};
  r.rd_plus = resistance_degree(r.plus);
  r.rd_minus = resistance_degree(r.minus);
  r.ratio = r.rd_plus / r.rd_minus;
  r.theta_plus = std::asin(1.0 / std::sqrt(2.0 * r.rd_plus));
  r.theta_minus = std::asin(1.0 / std::sqrt(2.0 * r.rd_minus));
  r.angle_gap = std::abs(r.theta_plus - r.theta_minus);
  r.overlap_gap = std::abs(1.0 / (2.0 * r.rd_plus) - 1.0 / (2.0 * r.rd_minus));
  const EdgeSpace ep(r.plus), em(r.minus);
  r.flow_overlap = std::abs(ep.flow_state(solve_electric(r.plus)).dot(em.flow_state(solve_electric(r.minus))));
  return r;
}

EstimateRecord witness_size_estimate(const CMat& pi, const CMat& delta, const CVec& psi, double tau,
                                     long range, std::uint64_t seed) {
  const RotationModel m = rotation_model(pi, delta, psi);
  const PowerState ps = run_power_state(m, range, false);
  EstimateRecord r = readout(qpe_distribution(ps.slices), range, tau, seed, {});
  r.quantity = "witness_size";
  const double s2 = r.sin_theta * r.sin_theta;
  r.estimate = s2 > 0 ? 1.0 / s2 : std::numeric_limits<double>::infinity();
  r.exact = 1.0 / (m.sin_theta * m.sin_theta);
  r.success = std::abs(r.sin_theta - m.sin_theta) <= 2.0 * kPi / double(range);
  r.iterations = 1;
  return r;
}

nlohmann::json to_json(const EstimateRecord& r) {
  return {{"quantity", r.quantity},
          {"estimate", r.estimate},
          {"exact", r.exact},
          {"sin_theta", r.sin_theta},
          {"counter_value", r.counter_value},
          {"T", r.range},
          {"tau", r.tau},
          {"eta", r.eta},
          {"walk_steps", r.walk_steps},
          {"iterations", r.iterations},
          {"success", r.success}};
}

}  // namespace elfs
