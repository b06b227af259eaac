#include "elfs/amplification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "elfs/errors.hpp"
#include "elfs/rng.hpp"

namespace elfs {
namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// psi ⊗ |anc>, ancilla fastest.
CVec with_ancilla(const CVec& psi, int anc) {
  CVec out = CVec::Zero(2 * psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) out(2 * i + anc) = psi(i);
  return out;
}

CVec ancilla_part(const CVec& v, int anc) {
  CVec out(v.size() / 2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v(2 * i + anc);
  return out;
}

}  // namespace

Transducer extend_private(const Transducer& s, Eigen::Index extra) {
  const Eigen::Index d = s.dim();
  CMat u = CMat::Identity(d + extra, d + extra);
  u.topLeftCorner(d, d) = s.unitary();
  CMat pub = CMat::Zero(d + extra, s.public_dim());
  pub.topRows(d) = s.public_basis();
  return Transducer(u, pub, s.label());
}

Transducer block_form(const Transducer& s) {
  CMat q(s.dim(), s.dim());
  q << s.public_basis(), s.private_basis();
  return Transducer(q.adjoint() * s.unitary() * q, CMat::Identity(s.dim(), s.public_dim()), s.label());
}

Transducer sequential_product(const Transducer& first, const Transducer& second) {
  if (first.public_dim() != second.public_dim()) {
    throw ValidationError("sequential product needs equal public dimensions");
  }
  const Transducer a = block_form(first), b = block_form(second);
  const Eigen::Index p = a.public_dim(), qa = a.dim() - p, qb = b.dim() - p;
  const Eigen::Index n = p + qa + qb;
  // a acts on [p | qa], b on [p | qb]; coordinates ordered [p | qa | qb].
  CMat ea = CMat::Identity(n, n);
  ea.topLeftCorner(p + qa, p + qa) = a.unitary();
  std::vector<Eigen::Index> idx(p + qb);
  for (Eigen::Index i = 0; i < p; ++i) idx[i] = i;
  for (Eigen::Index i = 0; i < qb; ++i) idx[p + i] = p + qa + i;
  CMat eb = CMat::Identity(n, n);
  for (Eigen::Index r = 0; r < p + qb; ++r) {
    for (Eigen::Index c = 0; c < p + qb; ++c) eb(idx[r], idx[c]) = b.unitary()(r, c);
  }
  return Transducer(eb * ea, CMat::Identity(n, p), second.label() + " * " + first.label());
}

long aa_schedule(int t) {
  return std::max(1L, static_cast<long>(std::floor(std::pow(1.2, t) + 1e-12)));
}

ExplicitRound explicit_round(const Transducer& r_blk, const Transducer& mark_blk, const CVec& start_rest,
                             long t_range) {
  const Eigen::Index n = r_blk.dim();
  const Eigen::Index p = r_blk.public_dim();
  const long tt = t_range;
  // Layout: ((x * T) + (j - 1)) * 2 + ancilla.
  auto idx = [tt](Eigen::Index x, long j, int anc) { return ((x * tt) + (j - 1)) * 2 + anc; };
  const Eigen::Index big = n * tt * 2;

  // op on slices j > k; other slices kept (keep_rest) or zeroed.
  auto on_slices = [&](const CMat& op, const CVec& v, long k, bool with_anc, bool keep_rest) {
    CVec out = keep_rest ? v : CVec(CVec::Zero(big));
    for (long j = k + 1; j <= tt; ++j) {
      const int blocks = with_anc ? 1 : 2;
      for (int b = 0; b < blocks; ++b) {
        const Eigen::Index w = with_anc ? 2 * n : n;
        CVec s(w);
        for (Eigen::Index x = 0; x < n; ++x) {
          if (with_anc) {
            s(2 * x) = v(idx(x, j, 0));
            s(2 * x + 1) = v(idx(x, j, 1));
          } else {
            s(x) = v(idx(x, j, b));
          }
        }
        s = op * s;
        for (Eigen::Index x = 0; x < n; ++x) {
          if (with_anc) {
            out(idx(x, j, 0)) = s(2 * x);
            out(idx(x, j, 1)) = s(2 * x + 1);
          } else {
            out(idx(x, j, b)) = s(x);
          }
        }
      }
    }
    return out;
  };

  CVec psi = CVec::Zero(big);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (long j = 1; j <= tt; ++j) psi(idx(x, j, 0)) = start_rest(x) / std::sqrt(double(tt));
  }
  auto public_part = [&](const CVec& v) {
    CVec out = CVec::Zero(big);
    for (Eigen::Index x = 0; x < p; ++x) {
      for (long j = 1; j <= tt; ++j) {
        for (int a = 0; a < 2; ++a) out(idx(x, j, a)) = v(idx(x, j, a));
      }
    }
    return out;
  };

  StreamOptions opts;
  opts.max_steps = static_cast<int>(tt) + 1;
  opts.tail_bound = 2.0;  // the continuing part of the final mark is the round's residue
  const CompositionTrace tr = compose_streaming(
      [&](int k) {
        const bool mark = k == tt;
        const Transducer& op = mark ? mark_blk : r_blk;
        const long from = mark ? 0 : k;
        return StreamStep{
            [&, from, mark](const CVec& v) { return on_slices(op.unitary(), v, from, mark, true); },
            [&, from, mark](const CVec& v) { return on_slices(op.catalyst_map(), v, from, mark, false); },
            public_part, [&, mark](const CVec& v) {
              CVec out = CVec::Zero(big);
              if (mark) {
                for (Eigen::Index i = 0; i < big; i += 2) out(i) = v(i);
              }
              return out;
            }};
      },
      psi, opts);
  return {tr.formula_complexity, tr.outputs.back(), tr.remainder};
}

namespace {

// Exact probability of continuing past a round of range T, rotation angle 2*theta per call.
double continue_fraction(double theta, long tt) {
  const double x = 4.0 * theta;
  double cos_sum;
  if (std::abs(std::sin(x / 2)) < 1e-9) {
    cos_sum = 0.0;
    for (long j = 1; j <= tt; ++j) cos_sum += std::cos(j * x);
  } else {
    cos_sum = std::sin(tt * x / 2) * std::cos((tt + 1) * x / 2) / std::sin(x / 2);
  }
  return std::clamp(0.5 + 0.5 * cos_sum / double(tt), 0.0, 1.0);  // mean of cos^2(2 j theta)
}

double projection_gap(const CVec& v, const CVec& axis) { return (v - axis * axis.dot(v)).norm(); }

}  // namespace

ZeroErrorResult zero_error_aa(const Transducer& u_refl, const Transducer& v_refl, const CVec& start,
                              const CVec& target, std::uint64_t seed, const ZeroErrorOptions& opts) {
  if (u_refl.dim() != v_refl.dim() ||
      (u_refl.public_projector() - v_refl.public_projector()).norm() > 1e-9) {
    throw ValidationError("reflection transducers must share their public space");
  }
  const CMat pub = v_refl.public_basis();
  for (const CVec* v : {&start, &target}) {
    if (v->size() != v_refl.dim() || std::abs(v->norm() - 1.0) > 1e-10 ||
        (pub * (pub.adjoint() * *v) - *v).norm() > 1e-10) {
      throw ValidationError("start and target must be unit vectors in the public space");
    }
  }

  // Registers: [public | private of V | private of U]; R = U V.
  const Transducer rb = sequential_product(v_refl, u_refl);
  const Eigen::Index n = rb.dim(), p = rb.public_dim();
  const Transducer mark = hadamard_test_transducer(extend_private(block_form(v_refl), n - v_refl.dim()));
  auto lift = [&](const CVec& v) {
    CVec o = CVec::Zero(n);
    o.head(p) = pub.adjoint() * v;
    return o;
  };
  const CVec s0 = lift(start), tg = lift(target);
  const cplx overlap = tg.dot(s0);
  const double alpha = std::min(1.0, std::abs(overlap));
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  const bool trivial = beta < 1e-12;
  const CVec rest = trivial ? CVec(CVec::Zero(n)) : CVec((s0 - overlap * tg) / beta);
  const double theta = std::asin(alpha);

  ZeroErrorResult res;
  ComposedAmplification& ca = res.composed;
  ca.alpha = alpha;
  ca.w_v = std::max(generic_catalyst(v_refl, start).complexity, generic_catalyst(v_refl, target).complexity);
  ca.w_u = std::max(generic_catalyst(u_refl, start).complexity, generic_catalyst(u_refl, target).complexity);
  ca.reference = (ca.w_u + ca.w_v + 1.0) / std::max(alpha, 1e-300);

  // (a) Las Vegas loop under classical control; transducers run with exact catalysts.
  {
    const CMat a_r = rb.action().topLeftCorner(p, p);
    const CMat a_m = mark.action().topLeftCorner(2 * p, 2 * p);
    const CVec tgp = tg.head(p);
    LasVegasStats& lv = res.las_vegas;
    lv.alpha = alpha;
    lv.runs = opts.runs;
    double calls_sum = 0, sched_sum = 0, rounds_sum = 0;
    for (int run = 0; run < opts.runs; ++run) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(run));
      CVec psi = s0.head(p);
      long calls = 0;
      double sched = 0;
      int t = 0;
      bool ok = false;
      double fid = 0.0;
      for (; t <= opts.m_max; ++t) {
        if (t > 0) {
          const long tt = aa_schedule(t);
          if (tt > opts.max_counter) break;
          sched += double(tt);
          const long j = std::uniform_int_distribution<long>(1, tt)(rng);
          for (long k = 0; k < j; ++k) psi = a_r * psi;
          calls += j;
        }
        const CVec out = a_m * with_ancilla(psi, 0);
        const CVec hit = ancilla_part(out, 0);
        if (uniform01(rng) < hit.squaredNorm()) {
          psi = hit / hit.norm();
          fid = std::norm(tgp.dot(psi));
          ok = true;
          break;
        }
        const CVec miss = ancilla_part(out, 1);
        psi = miss / miss.norm();
      }
      if (!ok || fid < 1.0 - 1e-9) ++lv.failures;
      lv.min_fidelity = std::min(lv.min_fidelity, ok ? fid : 0.0);
      calls_sum += double(calls);
      sched_sum += sched;
      rounds_sum += t;
      lv.max_rotation_calls = std::max(lv.max_rotation_calls, double(calls));
    }
    const double runs = std::max(1, opts.runs);
    lv.mean_rotation_calls = calls_sum / runs;
    lv.mean_schedule_sum = sched_sum / runs;
    lv.mean_rounds = rounds_sum / runs;
    double b2 = beta * beta;
    for (int t = 1; t <= opts.m_max && b2 > 1e-18; ++t) {
      const long tt = aa_schedule(t);
      lv.exact_schedule_sum += b2 * double(tt);
      b2 *= continue_fraction(theta, tt);
    }
  }

  // (b) Composed transducer. After each mark the continuing system state is exactly
  // |rest> ⊗ |0>, with the spent counter and ancilla registers as a garbage factor that
  // later rounds never touch; round t is certified on its normalized input and its
  // complexity enters scaled by the continuing mass beta_t^2.
  const Certificate c0 = generic_catalyst(mark, with_ancilla(s0, 0));
  double worst = c0.residual;
  double on = 0.0, off = 0.0;
  ca.marked_state = CMat::Zero(v_refl.dim(), v_refl.dim());
  auto add_marked = [&](const CVec& hit, double weight) {
    const CVec v = pub * hit.head(p);
    ca.marked_state += weight * v * v.adjoint();
  };
  {
    const CVec hit = ancilla_part(c0.output, 0);
    add_marked(hit, 1.0);
    on += std::norm(tg.dot(hit));
    off += hit.squaredNorm() - std::norm(tg.dot(hit));
  }
  double b2 = ancilla_part(c0.output, 1).squaredNorm();
  if (!trivial && projection_gap(ancilla_part(c0.output, 1), rest) > 1e-9) {
    throw ToleranceError("unmarked part of the first mark is not along the start remainder");
  }
  ca.formula_complexity = c0.complexity;

  std::vector<CVec> powers{rest};  // R^k |rest>
  std::vector<double> rot_w;       // W(R, R^k |rest>)
  std::vector<double> mark_w{0.0}, mark_on{0.0}, mark_off{0.0}, mark_cont{0.0};  // indexed by j >= 1
  std::vector<CVec> mark_hit{CVec()};
  int t = 1;
  for (; t <= opts.m_max && b2 > opts.tail_bound; ++t) {
    const long tt = aa_schedule(t);
    if (tt > opts.max_counter) {
      throw BudgetError("round " + std::to_string(t) + " needs a counter of range " + std::to_string(tt) +
                        " above the cap " + std::to_string(opts.max_counter));
    }
    while (static_cast<long>(powers.size()) <= tt) {
      const Certificate c = generic_catalyst(rb, powers.back());
      worst = std::max(worst, c.residual);
      rot_w.push_back(c.complexity);
      powers.push_back(c.output);
    }
    while (static_cast<long>(mark_w.size()) <= tt) {
      const long j = static_cast<long>(mark_w.size());
      const Certificate c = generic_catalyst(mark, with_ancilla(powers[j], 0));
      worst = std::max(worst, c.residual);
      const CVec hit = ancilla_part(c.output, 0), miss = ancilla_part(c.output, 1);
      if (projection_gap(miss, rest) > 1e-9 || projection_gap(hit, tg) > 1e-9) {
        throw ToleranceError("mark output left the two-dimensional rotation plane");
      }
      mark_w.push_back(c.complexity);
      mark_on.push_back(std::norm(tg.dot(hit)));
      mark_off.push_back(hit.squaredNorm() - std::norm(tg.dot(hit)));
      mark_cont.push_back(miss.squaredNorm());
      mark_hit.push_back(hit);
    }
    double wt = double(tt), m_on = 0, m_off = 0, m_cont = 0;
    for (long k = 0; k < tt; ++k) wt += double(tt - k) / double(tt) * rot_w[k];
    for (long j = 1; j <= tt; ++j) {
      wt += mark_w[j] / double(tt);
      m_on += mark_on[j] / double(tt);
      m_off += mark_off[j] / double(tt);
      m_cont += mark_cont[j] / double(tt);
      add_marked(mark_hit[j], b2 / double(tt));
    }
    ca.continue_mass.push_back(b2);
    ca.round_complexity.push_back(wt);
    ca.formula_complexity += b2 * (1.0 + wt);
    on += b2 * m_on;
    off += b2 * m_off;
    b2 *= m_cont;
  }
  ca.rounds = t - 1;
  ca.truncation_tail = b2;
  if (b2 > opts.tail_bound) {
    throw BudgetError("zero-error amplification truncated at m = " + std::to_string(ca.rounds) +
                      " with continuing mass " + fmt(b2) + "; raise m_max");
  }
  // Catalyst blocks sit in distinct counter and private registers, so their norms add.
  ca.complexity = ca.formula_complexity;
  ca.fidelity = on;
  ca.off_target = off;
  ca.residual = worst;
  if (on < 1.0 - 1e-9 - b2 || off > 1e-9) {
    throw ToleranceError("composed output is not the target up to garbage (fidelity " + fmt(on) + ")");
  }

  Certificate& cert = res.certificate;
  cert.input = start;
  cert.output = target;  // public marginal; the garbage factor is not represented
  cert.complexity = ca.complexity;
  cert.residual = worst;
  cert.truncation_tail = b2;
  cert.calls = ca.rounds;
  return res;
}

nlohmann::json to_json(const ZeroErrorResult& r) {
  const LasVegasStats& lv = r.las_vegas;
  const ComposedAmplification& ca = r.composed;
  return {{"alpha", lv.alpha},
          {"las_vegas",
           {{"runs", lv.runs},
            {"failures", lv.failures},
            {"mean_rotation_calls", lv.mean_rotation_calls},
            {"max_rotation_calls", lv.max_rotation_calls},
            {"mean_schedule_sum", lv.mean_schedule_sum},
            {"exact_schedule_sum", lv.exact_schedule_sum},
            {"min_fidelity", lv.min_fidelity}}},
          {"composed",
           {{"rounds", ca.rounds},
            {"W", ca.complexity},
            {"reference", ca.reference},
            {"fidelity", ca.fidelity},
            {"truncation_tail", ca.truncation_tail}}},
          {"certificate", to_json(r.certificate)}};
}

}  // namespace elfs
