#include "elfs/edge_space.hpp"

#include <cmath>

#include "elfs/errors.hpp"

namespace elfs {

EdgeSpace::EdgeSpace(Graph g) : g_(std::move(g)) {
  if (g_.num_arcs() > kMaxArcDim) {
    throw ValidationError("arc space dimension " + std::to_string(g_.num_arcs()) +
                          " exceeds the cap " + std::to_string(kMaxArcDim));
  }
}

CVec EdgeSpace::star_state(int x) const {
  if (!(g_.degree(x) > 0.0)) {
    throw ValidationError("vertex " + std::to_string(x) + " is isolated; its star state is undefined");
  }
  CVec phi = CVec::Zero(dim());
  for (const Neighbor& nb : g_.neighbors(x)) phi(nb.arc) = std::sqrt(nb.w / g_.degree(x));
  return phi;
}

std::vector<int> EdgeSpace::interior_vertices() const {
  std::vector<int> out;
  for (int x = 0; x < g_.num_vertices(); ++x) {
    if (x != g_.source() && !g_.is_sink(x)) out.push_back(x);
  }
  return out;
}

std::vector<int> EdgeSpace::non_sink_vertices() const {
  std::vector<int> out;
  for (int x = 0; x < g_.num_vertices(); ++x) {
    if (!g_.is_sink(x)) out.push_back(x);
  }
  return out;
}

CMat EdgeSpace::swap() const {
  CMat s = CMat::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a) s(swap_partner(a), a) = 1.0;
  return s;
}

CMat EdgeSpace::sym_projector() const {
  return 0.5 * (CMat::Identity(dim(), dim()) + swap());
}

CMat EdgeSpace::antisym_projector() const {
  return 0.5 * (CMat::Identity(dim(), dim()) - swap());
}

CMat EdgeSpace::star_projector(const std::vector<int>& vertices) const {
  CMat p = CMat::Zero(dim(), dim());
  for (int x : vertices) {
    const CVec phi = star_state(x);
    p += phi * phi.adjoint();
  }
  return p;
}

CMat EdgeSpace::star_projector() const { return star_projector(interior_vertices()); }

CMat EdgeSpace::closed_projector() const {
  // Antisymmetric states in edge coordinates c_k: arc 2k gets c_k/sqrt2, arc 2k+1
  // gets -c_k/sqrt2. Constraints <phi_x|g> = 0 for x outside M and <f|g> = 0.
  const auto outside = non_sink_vertices();
  const int edges = g_.num_edges();
  RMat c = RMat::Zero(static_cast<int>(outside.size()) + 1, edges);
  const double r2 = std::sqrt(0.5);
  for (std::size_t i = 0; i < outside.size(); ++i) {
    const int x = outside[i];
    for (const Neighbor& nb : g_.neighbors(x)) {
      c(i, nb.arc / 2) = (nb.arc % 2 == 0 ? r2 : -r2) * std::sqrt(nb.w / g_.degree(x));
    }
  }
  const CVec f = flow_state(solve_electric(g_));
  for (int k = 0; k < edges; ++k) c(outside.size(), k) = std::sqrt(2.0) * f(2 * k).real();
  const RMat kern = kernel_basis(c);
  CMat basis = CMat::Zero(dim(), kern.cols());
  for (int k = 0; k < edges; ++k) {
    basis.row(2 * k) = r2 * kern.row(k).cast<cplx>();
    basis.row(2 * k + 1) = -r2 * kern.row(k).cast<cplx>();
  }
  return basis * basis.adjoint();
}

CMat EdgeSpace::walk_unitary() const {
  const CMat id = CMat::Identity(dim(), dim());
  return (2.0 * star_projector() - id) * (2.0 * sym_projector() - id);
}

CMat EdgeSpace::partial_rotation(double theta) const {
  const CMat id = CMat::Identity(dim(), dim());
  const cplx phase = 1.0 - std::polar(1.0, theta);
  return id - phase * (id - sym_projector());
}

CVec EdgeSpace::flow_state(const ElectricSolution& sol) const {
  CVec f = CVec::Zero(dim());
  const double scale = 1.0 / std::sqrt(2.0 * sol.resistance);
  for (int a = 0; a < dim(); ++a) f(a) = scale * sol.flow[a] / std::sqrt(g_.arc(a).w);
  return f;
}

CVec EdgeSpace::apply_swap(const CVec& v) const {
  CVec out(dim());
  for (int a = 0; a < dim(); ++a) out(swap_partner(a)) = v(a);
  return out;
}

CVec EdgeSpace::apply_star_reflection(const CVec& v) const {
  CVec out = -v;
  for (int x : interior_vertices()) {
    cplx amp = 0.0;
    for (const Neighbor& nb : g_.neighbors(x)) amp += std::sqrt(nb.w / g_.degree(x)) * v(nb.arc);
    for (const Neighbor& nb : g_.neighbors(x)) out(nb.arc) += 2.0 * amp * std::sqrt(nb.w / g_.degree(x));
  }
  return out;
}

CVec EdgeSpace::apply_walk(const CVec& v) const { return apply_star_reflection(apply_swap(v)); }

CMat joint_kernel_projector(const CMat& pi, const CMat& delta) {
  // For projectors, [Pi; Delta]^dagger [Pi; Delta] = Pi + Delta, so the joint kernel
  // is the kernel of this PSD sum; its eigenvalues are the squared singular values.
  const CMat basis = hermitian_kernel_basis(pi + delta);
  if (basis.cols() == 0) return CMat::Zero(pi.cols(), pi.cols());
  return basis * basis.adjoint();
}

CMat invariant_projector(const CMat& pi, const CMat& delta) {
  const int n = static_cast<int>(pi.rows());
  const CMat id = CMat::Identity(n, n);
  const CMat comp = id - delta;
  const CMat p = comp * (id - pinv_hermitian(pi - pi * delta * pi) * comp);
  const CMat direct = joint_kernel_projector(pi, delta);
  const double gap = op_norm(p - direct);
  if (gap > 1e-8) {
    throw ToleranceError("kernel-intersection projector: pseudoinverse identity and SVD differ by " +
                         std::to_string(gap));
  }
  return p;
}

namespace {

nlohmann::json legend(const EdgeSpace& es) {
  nlohmann::json arcs = nlohmann::json::array();
  for (int a = 0; a < es.dim(); ++a) arcs.push_back({es.graph().arc(a).from, es.graph().arc(a).to});
  return arcs;
}

}  // namespace

nlohmann::json state_to_json(const EdgeSpace& es, const CVec& v) {
  nlohmann::json amps = nlohmann::json::array();
  for (int a = 0; a < v.size(); ++a) amps.push_back({v(a).real(), v(a).imag()});
  return {{"arcs", legend(es)}, {"amplitudes", amps}};
}

nlohmann::json operator_to_json(const EdgeSpace& es, const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return {{"arcs", legend(es)}, {"matrix", rows}};
}

}  // namespace elfs
