#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elfs/linalg.hpp"
#include "elfs/transducer.hpp"
#include "json.hpp"

namespace elfs {

/// Span program over inputs x in {0, ..., q-1}^n. The input space H = C^h is split into
/// mutually orthogonal H_1, ..., H_n, H_true, H_false; each H_j is spanned by its blocks
/// H_{j,a}, which may overlap. A maps H to the target space V = C^v.
class SpanProgram {
 public:
  /// blocks[j][a] holds basis columns of H_{j,a} (possibly zero columns). tau is rescaled
  /// so that ||A^+ tau|| = 1; the caller's tau is kept as original_target().
  SpanProgram(CMat a, CVec tau, std::vector<std::vector<CMat>> blocks, CMat true_basis, CMat false_basis);

  int input_dim() const { return static_cast<int>(a_.cols()); }
  int target_dim() const { return static_cast<int>(a_.rows()); }
  int num_variables() const { return static_cast<int>(blocks_.size()); }
  int alphabet(int j) const { return static_cast<int>(blocks_[j].size()); }

  const CMat& a() const { return a_; }
  const CVec& target() const { return tau_; }
  const CVec& original_target() const { return tau_original_; }
  /// A^+ tau, unit norm.
  const CVec& w0() const { return w0_; }

  /// Projector onto H(x) = H_{1,x_1} + ... + H_{n,x_n} + H_true.
  CMat available_projector(const std::vector<int>& x) const;
  /// Projector onto T = ker A ⊕ span{w0}.
  const CMat& t_projector() const { return t_proj_; }

 private:
  void check_input(const std::vector<int>& x) const;

  CMat a_;
  CVec tau_, tau_original_, w0_;
  std::vector<std::vector<CMat>> blocks_;
  CMat true_basis_, false_basis_;
  CMat t_proj_;
};

struct PositiveWitness {
  double size = 0.0;           // w_+(x) = ||w||^2
  CVec witness;                // min-norm w in H(x) with A w = tau
  double q_overlap_sq = 0.0;   // ||P_{Q_x} w0||^2, Q_x = T ∩ H(x)
  double identity_gap = 0.0;   // |q_overlap_sq * size - 1|
};

struct NegativeWitness {
  double error = 0.0;     // e_-(x) = min ||Pi_{H(x)} A^dagger omega||^2 over tau^dagger omega = 1
  double size = 0.0;      // ~w_-(x) = min ||A^dagger omega||^2 over those minimizers
  CVec omega;             // one minimizer (not unique in general)
};

struct PseudoinverseReport {
  double witness_side = 0.0;      // ~w_- from the two-stage minimization
  double pseudoinverse_side = 0.0;  // 1 + ||(P_T⊥ P_H(x) P_T⊥)^+ P_H(x)⊥ w0||^2
  double gap = 0.0;
};

struct ProjectorInstance {
  CMat pi;      // onto T⊥
  CMat delta;   // onto H(x)⊥
  CVec psi;     // w0
  double invariant_overlap_sq = 0.0;  // ||P_{ker Pi ∩ ker Delta} psi||^2 = 1 / w_+(x)
  double positive_size = 0.0;
  double negative_size = 0.0;
  double generic_complexity = 0.0;    // ||w||^2 of the pseudoinverse catalyst
  double effective_gap_complexity = 0.0;
};

/// Throws ValidationError for x outside P_1, naming the residual of A w = tau on H(x).
PositiveWitness positive_witness(const SpanProgram& p, const std::vector<int>& x);
NegativeWitness negative_witness(const SpanProgram& p, const std::vector<int>& x);
/// Throws ToleranceError if the two sides differ by more than 1e-8.
PseudoinverseReport pseudoinverse_identity(const SpanProgram& p, const std::vector<int>& x);
/// (Pi, Delta, psi) for witness_size_estimate; identities asserted to 1e-8.
ProjectorInstance to_projector_instance(const SpanProgram& p, const std::vector<int>& x);

/// Schema: {"dims": {"H": h, "V": v}, "A": [[...]], "tau": [...],
///          "blocks": [{"var": j, "value": a, "basis": [[...], ...]}, ...],
///          "true": [[...], ...], "false": [[...], ...]}. Basis entries are vectors in C^h,
/// numbers real or [re, im].
SpanProgram span_program_from_json(const nlohmann::json& j);

namespace span_fixtures {
/// A = (1 1) on C^2, H_{1,1} = span e1, H_{2,1} = span e2, zero 0-blocks.
SpanProgram or2();
/// A two-dimensional target with a one-parameter family of negative witnesses.
SpanProgram two_target();
/// Random program with v <= max_v, h <= max_h and a positive input; degenerate draws are redrawn.
struct RandomInstance {
  SpanProgram program;
  std::vector<int> input;
};
RandomInstance random_instance(std::uint64_t seed, int max_v = 8, int max_h = 10);
}  // namespace span_fixtures

nlohmann::json to_json(const PositiveWitness& w);
nlohmann::json to_json(const NegativeWitness& w);

}  // namespace elfs
