#pragma once

#include <vector>

#include "elfs/electric.hpp"
#include "elfs/graph.hpp"
#include "elfs/linalg.hpp"
#include "json.hpp"

namespace elfs {

// Operator-level work is capped at 1024 arcs (512 edges).
inline constexpr int kMaxArcDim = 1024;

/// The arc space l(E) of a graph: basis index a <-> arc g.arc(a).
///
/// Arc 2k and 2k+1 are the two orientations of edge k, so SWAP pairs them.
class EdgeSpace {
 public:
  explicit EdgeSpace(Graph g);

  const Graph& graph() const { return g_; }
  int dim() const { return g_.num_arcs(); }

  static int swap_partner(int arc) { return arc ^ 1; }

  /// |phi_x> = (1/sqrt(d_x)) sum_y sqrt(w_xy) |xy>.
  CVec star_state(int x) const;
  /// Vertices whose stars span the star subspace: V \ ({s} U M).
  std::vector<int> interior_vertices() const;
  /// Vertices outside M, including s.
  std::vector<int> non_sink_vertices() const;

  CMat swap() const;
  CMat sym_projector() const;      // Pi_+
  CMat antisym_projector() const;  // Pi_-
  CMat star_projector() const;     // Pi_*
  /// Projector onto the star states of the given vertices (orthogonal supports).
  CMat star_projector(const std::vector<int>& vertices) const;
  /// Flows closed outside M, orthogonal to |f>, as an SVD kernel.
  CMat closed_projector() const;

  /// U = (2 Pi_* - I)(2 Pi_+ - I).
  CMat walk_unitary() const;
  /// U(theta) = I - (1 - e^{i theta})(I - Pi_+).
  CMat partial_rotation(double theta) const;

  /// Electric flow state |f> = (1/sqrt(2 R_s)) sum f_xy / sqrt(w_xy) |xy>.
  CVec flow_state(const ElectricSolution& sol) const;

  CVec apply_swap(const CVec& v) const;
  CVec apply_star_reflection(const CVec& v) const;  // (2 Pi_* - I) v
  CVec apply_walk(const CVec& v) const;

 private:
  Graph g_;
};

/// Projector onto ker(Pi) ∩ ker(Delta) via (I - Delta)[I - (Pi - Pi Delta Pi)^+ (I - Delta)].
/// Cross-checked against the joint-kernel SVD; throws ToleranceError if they differ by > 1e-8.
CMat invariant_projector(const CMat& pi, const CMat& delta);

/// Joint-kernel SVD form only.
CMat joint_kernel_projector(const CMat& pi, const CMat& delta);

nlohmann::json state_to_json(const EdgeSpace& es, const CVec& v);
nlohmann::json operator_to_json(const EdgeSpace& es, const CMat& m);

}  // namespace elfs
