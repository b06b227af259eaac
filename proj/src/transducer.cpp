#include "elfs/transducer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

#include "elfs/edge_space.hpp"
#include "elfs/electric.hpp"
#include "elfs/errors.hpp"

namespace elfs {
namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// Eigenvectors of a Hermitian projector with eigenvalue above / below 1/2.
CMat projector_eigenbasis(const CMat& p, bool range) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (p + p.adjoint()));
  std::vector<int> cols;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if ((es.eigenvalues()(i) > 0.5) == range) cols.push_back(i);
  }
  CMat b(p.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) b.col(j) = es.eigenvectors().col(cols[j]);
  return b;
}

}  // namespace

CMat projector_kernel_basis(const CMat& p) { return projector_eigenbasis(p, false); }
CMat projector_range_basis(const CMat& p) { return projector_eigenbasis(p, true); }

Transducer::Transducer(CMat unitary, CMat public_basis, std::string label)
    : u_(std::move(unitary)), pub_(std::move(public_basis)), label_(std::move(label)) {
  if (u_.rows() != u_.cols() || pub_.rows() != u_.rows()) {
    throw ValidationError("transducer shapes disagree: unitary " + std::to_string(u_.rows()) + "x" +
                          std::to_string(u_.cols()) + ", public basis rows " +
                          std::to_string(pub_.rows()));
  }
  const double ud = unitarity_defect(u_);
  if (ud > 1e-9) throw ToleranceError("transducer operator is not unitary (defect " + fmt(ud) + ")");
  const CMat gram = pub_.adjoint() * pub_;
  const double od = (gram - CMat::Identity(gram.rows(), gram.cols())).norm();
  if (od > 1e-9) throw ValidationError("public basis is not orthonormal (defect " + fmt(od) + ")");
  priv_ = projector_kernel_basis(public_projector());
}

const CMat& Transducer::catalyst_map() const {
  if (!catalyst_map_) {
    const Eigen::Index k = priv_.cols();
    if (k == 0) {
      catalyst_map_ = CMat::Zero(dim(), dim());
    } else {
      const CMat inner = CMat::Identity(k, k) - priv_.adjoint() * u_ * priv_;
      catalyst_map_ = priv_ * pinv(inner) * (priv_.adjoint() * u_);
    }
  }
  return *catalyst_map_;
}

CMat Transducer::action() const {
  const CMat p = public_projector();
  return p * u_ * (CMat::Identity(dim(), dim()) + catalyst_map()) * p;
}

Certificate verify_transduction(const Transducer& s, const CVec& xi, const CVec& w, double tol) {
  if (xi.size() != s.dim() || w.size() != s.dim()) {
    throw ValidationError("certificate vectors do not match the transducer dimension");
  }
  Certificate c;
  c.input = xi;
  c.catalyst = w;
  const CVec out = s.unitary() * (xi + w);
  c.output = s.public_basis() * (s.public_basis().adjoint() * out);
  c.complexity = w.squaredNorm();
  c.residual = (out - c.output - w).norm();
  c.norm_defect = std::abs(c.output.norm() - xi.norm());
  c.calls = 1;
  if (c.residual > tol) {
    throw ToleranceError(s.label() + ": transduction residual " + fmt(c.residual) + " exceeds " +
                         fmt(tol));
  }
  if (c.norm_defect > tol) {
    throw ToleranceError(s.label() + ": output norm differs from input norm by " + fmt(c.norm_defect));
  }
  return c;
}

Certificate generic_catalyst(const Transducer& s, const CVec& xi) {
  if (xi.size() != s.dim()) throw ValidationError("input does not match the transducer dimension");
  const double off = (s.private_basis().adjoint() * xi).norm();
  if (off > 1e-10 * std::max(1.0, xi.norm())) {
    throw ValidationError(s.label() + ": input has a private component of norm " + fmt(off));
  }
  return verify_transduction(s, xi, s.catalyst_map() * xi);
}

CVec effective_gap_catalyst(const CMat& pi, const CMat& delta, const CVec& psi) {
  // (Pi - Pi Delta Pi)^+ = B (I - B^dagger Delta B)^+ B^dagger with B a basis of im(Pi).
  const CMat b = projector_range_basis(pi);
  if (b.cols() == 0) return CVec::Zero(psi.size());
  const CMat inner = CMat::Identity(b.cols(), b.cols()) - b.adjoint() * delta * b;
  return b * (pinv_hermitian(inner) * (b.adjoint() * (delta * psi)));
}

EffectiveGapCertificate effective_gap_transducer(const CMat& pi, const CMat& delta, const CVec& psi,
                                                 double theta) {
  const Eigen::Index dim = pi.rows();
  if (pi.cols() != dim || delta.rows() != dim || delta.cols() != dim || psi.size() != dim) {
    throw ValidationError("effective-gap inputs have mismatched dimensions");
  }
  const double leak = (pi * psi).norm();
  if (leak > 1e-10 * std::max(1.0, psi.norm())) {
    throw ValidationError("input state is not in ker(Pi): ||Pi psi|| = " + fmt(leak));
  }
  const CMat id = CMat::Identity(dim, dim);
  EffectiveGapCertificate out;
  out.invariant = invariant_projector(pi, delta);
  const CVec w = effective_gap_catalyst(pi, delta, psi);
  out.catalyst_kernel_part = (w - pi * w).norm();
  out.projection_residual = ((id - delta) * (psi + w) - out.invariant * psi).norm();

  const CMat pub = projector_kernel_basis(pi);
  const cplx phase = std::polar(1.0, theta);
  const Transducer rot(id - (1.0 - phase) * (id - delta), pub, "partial rotation");
  out.rotation = verify_transduction(rot, psi, w);
  const CVec expected = psi - (1.0 - phase) * (out.invariant * psi);
  out.output_residual = (out.rotation.output - expected).norm();

  if (std::abs(std::remainder(theta - M_PI, 2.0 * M_PI)) < 1e-12) {
    const Transducer refl((2.0 * pi - id) * (2.0 * delta - id), pub, "reflection pair");
    out.reflection = verify_transduction(refl, psi, w);
  }
  return out;
}

Transducer walk_transducer(const Graph& g) {
  const EdgeSpace es(g);
  if (es.dim() > kMaxArcDim) {
    throw ValidationError("arc space dimension " + std::to_string(es.dim()) + " exceeds " +
                          std::to_string(kMaxArcDim));
  }
  return Transducer(es.walk_unitary(), projector_kernel_basis(es.star_projector()), "walk operator");
}

ElfsReflection elfs_reflection_certificate(const Graph& g) {
  const EdgeSpace es(g);
  const Transducer u = walk_transducer(g);
  const ElectricSolution sol = solve_electric(g);
  const int s = g.source();
  const double r = sol.resistance;

  CVec w = CVec::Zero(es.dim());
  for (int x : es.interior_vertices()) {
    w += (sol.voltage(x) * std::sqrt(g.degree(x))) * es.star_state(x);
  }
  w /= r * std::sqrt(g.degree(s));

  const CVec phi_s = es.star_state(s);
  const CVec f = es.flow_state(sol);
  ElfsReflection out;
  out.certificate = verify_transduction(u, phi_s, w);
  out.generic_catalyst = u.catalyst_map() * phi_s;
  out.catalyst_gap = (out.generic_catalyst - w).norm();
  double et = 0.0;
  for (int x = 0; x < g.num_vertices(); ++x) et += g.degree(x) * sol.voltage(x) * sol.voltage(x);
  et /= r;
  out.expected_complexity = et / (r * g.degree(s)) - 1.0;
  out.expected_output = 2.0 * f * f.dot(phi_s) - phi_s;
  out.output_residual = (out.certificate.output - out.expected_output).norm();
  return out;
}

Transducer public_reflection(const Transducer& like, const CVec& phi, std::string label) {
  const CVec p = like.public_basis() * (like.public_basis().adjoint() * phi);
  if ((p - phi).norm() > 1e-10 || std::abs(phi.norm() - 1.0) > 1e-10) {
    throw ValidationError("reflection axis must be a unit vector in the public space");
  }
  const CMat id = CMat::Identity(like.dim(), like.dim());
  return Transducer(id + 2.0 * phi * phi.adjoint() - 2.0 * like.public_projector(), like.public_basis(),
                    std::move(label));
}

Transducer hadamard_test_transducer(const Transducer& v) {
  const Eigen::Index d = v.dim();
  CMat had(2, 2);
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  const CMat id_sys = CMat::Identity(d, d);
  const CMat h_anc = Eigen::kroneckerProduct(id_sys, had);
  CMat cv = CMat::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    cv(2 * i, 2 * i) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) cv(2 * i + 1, 2 * j + 1) = v.unitary()(i, j);
  }
  const CMat pub = Eigen::kroneckerProduct(v.public_basis(), CMat::Identity(2, 2));
  return Transducer(h_anc * cv * h_anc, pub, "Hadamard test of " + v.label());
}

CompositionTrace compose_streaming(const std::function<StreamStep(int)>& step, const CVec& psi00,
                                   const StreamOptions& opts) {
  if (opts.max_steps < 0) throw ValidationError("counter truncation m must be nonnegative");
  CompositionTrace tr;
  const bool degraded = opts.catalyst_scale != 1.0;
  const double c = opts.catalyst_scale;
  CVec cont = psi00;
  tr.continue_mass.push_back(cont.squaredNorm());
  double res2 = 0.0;
  double weighted = 0.0;  // sum over t >= 1 of ||psi_{t,0}||^2 W_t, with W_t normalized
  int t = 0;
  for (; t < opts.max_steps; ++t) {
    if (opts.stop_when_converged && t > 0 && tr.continue_mass.back() < opts.tail_bound) break;
    const StreamStep st = step(t);
    const CVec w = st.catalyst(cont);
    const CVec out = st.apply(cont + w);
    const CVec pub = st.public_part(out);
    res2 += (out - pub - w).squaredNorm();
    const CVec done = st.done_part(pub);
    const CVec next = pub - done;
    tr.step_complexity.push_back(w.squaredNorm());
    if (t == 0) {
      tr.formula_complexity += w.squaredNorm();
    } else {
      weighted += w.squaredNorm();
      tr.formula_complexity += cont.squaredNorm();
    }
    const CVec block = t == 0 ? w : CVec(cont + w);
    tr.measured_complexity += block.squaredNorm();
    if (opts.keep_blocks) tr.catalyst_blocks.push_back(block);
    if (degraded) {
      const CVec in = t == 0 ? CVec(cont + c * w) : CVec(c * (cont + w));
      tr.degraded_outputs.push_back(st.done_part(st.public_part(st.apply(in))));
    }
    tr.outputs.push_back(done);
    cont = next;
    tr.continue_mass.push_back(cont.squaredNorm());
  }
  tr.formula_complexity += weighted;
  tr.steps = t;
  tr.truncation_tail = cont.squaredNorm();
  tr.remainder = cont;
  tr.residual = std::sqrt(res2);
  if (tr.residual > kCertificateTol * std::max<long>(1, tr.steps)) {
    throw ToleranceError("composition residual " + fmt(tr.residual) + " exceeds tolerance");
  }
  if (tr.truncation_tail > opts.tail_bound) {
    throw BudgetError("counter truncated at m = " + std::to_string(tr.steps) +
                      " with continuing mass " + fmt(tr.truncation_tail) + " above the bound " +
                      fmt(opts.tail_bound) + "; raise m_max");
  }
  return tr;
}

DenseComposition compose_transducers(const std::vector<Transducer>& steps, const std::vector<CMat>& done,
                                     const CVec& psi00, double tail_bound) {
  const int m = static_cast<int>(steps.size());
  if (m == 0) throw ValidationError("composition needs at least one step");
  if (static_cast<int>(done.size()) != m) throw ValidationError("need one H_1 projector per step");
  const Eigen::Index d = steps[0].dim();
  for (const Transducer& s : steps) {
    if (s.dim() != d) throw ValidationError("composed transducers must share one space");
    if ((s.public_projector() - steps[0].public_projector()).norm() > 1e-9) {
      throw ValidationError("composed transducers must share one public space");
    }
  }

  StreamOptions opts;
  opts.max_steps = m;
  opts.tail_bound = tail_bound;
  opts.keep_blocks = true;
  const CompositionTrace tr = compose_streaming(
      [&](int t) {
        const Transducer& s = steps[t];
        const CMat p = s.public_projector();
        const CMat& dn = done[t];
        return StreamStep{[&s](const CVec& v) { return CVec(s.unitary() * v); },
                          [&s](const CVec& v) { return CVec(s.catalyst_map() * v); },
                          [p](const CVec& v) { return CVec(p * v); },
                          [dn](const CVec& v) { return CVec(dn * v); }};
      },
      psi00, opts);

  // Composite on C^{m+1} ⊗ C^d: block t is sum_t |t><t| ⊗ S_t (S_m = I), then the
  // counter increments on public parts, cyclically.
  const Eigen::Index big = (m + 1) * d;
  CMat sel = CMat::Zero(big, big);
  for (int t = 0; t <= m; ++t) {
    sel.block(t * d, t * d, d, d) = t < m ? steps[t].unitary() : CMat::Identity(d, d);
  }
  CMat shift = CMat::Zero(big, big);
  for (int t = 0; t <= m; ++t) {
    const CMat p = steps[std::min(t, m - 1)].public_projector();
    const int nt = (t + 1) % (m + 1);
    shift.block(nt * d, t * d, d, d) += p;
    shift.block(t * d, t * d, d, d) += CMat::Identity(d, d) - p;
  }
  CMat pub_cols(big, 0);
  auto append = [&](int t, const CMat& basis) {
    CMat ext = CMat::Zero(big, basis.cols());
    ext.block(t * d, 0, d, basis.cols()) = basis;
    CMat grown(big, pub_cols.cols() + ext.cols());
    grown << pub_cols, ext;
    pub_cols = grown;
  };
  append(0, steps[0].public_basis());
  for (int t = 1; t <= m; ++t) append(t, projector_range_basis(done[t - 1]));

  DenseComposition out{Transducer(shift * sel, pub_cols, "composition"), {}, tr};
  CVec xi = CVec::Zero(big), w = CVec::Zero(big);
  xi.head(d) = psi00;
  for (int t = 0; t < m; ++t) w.segment(t * d, d) = tr.catalyst_blocks[t];
  out.certificate = verify_transduction(out.composite, xi, w,
                                        kCertificateTol + std::sqrt(tr.truncation_tail));
  out.certificate.truncation_tail = tr.truncation_tail;
  out.certificate.calls = m;
  return out;
}

OracleModeRun oracle_mode_run(const Transducer& s, const Certificate& cert, double scale) {
  OracleModeRun r;
  r.scale = scale;
  const CVec out = s.unitary() * (cert.input + scale * cert.catalyst);
  const CVec pub = s.public_basis() * (s.public_basis().adjoint() * out);
  r.error = (pub - cert.output).norm();
  r.catalyst_deficit = (1.0 - scale) * cert.catalyst.norm();
  r.equivalent_calls = r.error > 0 ? 4.0 * cert.complexity / (r.error * r.error)
                                   : std::numeric_limits<double>::infinity();
  return r;
}

nlohmann::json to_json(const Certificate& c) {
  return {{"W", c.complexity},
          {"residual", c.residual},
          {"calls", c.calls},
          {"truncation_tail", c.truncation_tail}};
}

}  // namespace elfs
