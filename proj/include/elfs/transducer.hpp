#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elfs/graph.hpp"
#include "elfs/linalg.hpp"
#include "json.hpp"

namespace elfs {

inline constexpr double kCertificateTol = 1e-9;

/// A unitary on H ⊕ L, with H given by an orthonormal basis of columns.
class Transducer {
 public:
  Transducer(CMat unitary, CMat public_basis, std::string label = {});

  const CMat& unitary() const { return u_; }
  const CMat& public_basis() const { return pub_; }
  const CMat& private_basis() const { return priv_; }
  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(u_.rows()); }
  int public_dim() const { return static_cast<int>(pub_.cols()); }

  CMat public_projector() const { return pub_ * pub_.adjoint(); }
  CMat private_projector() const { return priv_ * priv_.adjoint(); }

  /// Linear map xi -> w from the pseudoinverse formula w = (Pi - Pi S Pi)^+ Pi S xi,
  /// Pi the private projector. Evaluated in private coordinates, where
  /// Pi - Pi S Pi = B (I - B^dagger S B) B^dagger.
  const CMat& catalyst_map() const;

  /// Transduction action xi -> tau on H, as an operator on the full space.
  CMat action() const;

 private:
  CMat u_, pub_, priv_;
  std::string label_;
  mutable std::optional<CMat> catalyst_map_;
};

/// Witness of xi ⊕ w -> tau ⊕ w.
struct Certificate {
  CVec input;
  CVec output;
  CVec catalyst;
  double complexity = 0.0;  // ||w||^2
  double residual = 0.0;    // ||S(xi ⊕ w) - (tau ⊕ w)||
  double norm_defect = 0.0; // | ||tau|| - ||xi|| |
  double truncation_tail = 0.0;
  long calls = 0;
};

/// Applies S to xi ⊕ w and reads off tau; throws ToleranceError when the residual
/// or the norm defect exceeds tol.
Certificate verify_transduction(const Transducer& s, const CVec& xi, const CVec& w,
                                double tol = kCertificateTol);

/// Certificate with the generic pseudoinverse catalyst. xi must lie in H.
Certificate generic_catalyst(const Transducer& s, const CVec& xi);

/// Orthonormal basis of ker(p) / im(p) for a Hermitian projector p.
CMat projector_kernel_basis(const CMat& p);
CMat projector_range_basis(const CMat& p);

/// (Pi - Pi Delta Pi)^+ Delta psi.
CVec effective_gap_catalyst(const CMat& pi, const CMat& delta, const CVec& psi);

struct EffectiveGapCertificate {
  Certificate rotation;                   // under U(theta) = I - (1 - e^{i theta})(I - Delta)
  std::optional<Certificate> reflection;  // theta = pi: under (2 Pi - I)(2 Delta - I)
  CMat invariant;                         // P onto ker(Pi) ∩ ker(Delta)
  double projection_residual = 0.0;            // ||(I - Delta)(psi + w) - P psi||
  double catalyst_kernel_part = 0.0;      // ||(I - Pi) w||
  double output_residual = 0.0;           // ||tau - (I - (1 - e^{i theta}) P) psi||
};

/// Certificates for psi in ker(Pi) under the partial rotation about ker(Pi) ∩ ker(Delta).
EffectiveGapCertificate effective_gap_transducer(const CMat& pi, const CMat& delta, const CVec& psi,
                                                 double theta);

/// The elfs reflection |phi_s> -> (2|f><f| - I)|phi_s> under the walk operator.
struct ElfsReflection {
  Certificate certificate;       // closed-form catalyst, verified
  CVec generic_catalyst;         // pseudoinverse catalyst
  double catalyst_gap = 0.0;     // ||closed form - generic||
  double expected_complexity = 0.0;  // ET_s / (R_s d_s) - 1
  CVec expected_output;          // (2|f><f| - I)|phi_s>
  double output_residual = 0.0;
};
ElfsReflection elfs_reflection_certificate(const Graph& g);

/// Walk operator on l(E) as a transducer with public space ker(Pi_*).
Transducer walk_transducer(const Graph& g);

/// Reflection 2|phi><phi| - I on the public space of `like`, identity on its private space.
Transducer public_reflection(const Transducer& like, const CVec& phi, std::string label = {});

/// V' = (I ⊗ H) cV (I ⊗ H), ancilla as the last (fastest) tensor factor.
Transducer hadamard_test_transducer(const Transducer& v);

// ---------------------------------------------------------------------------
// Composition with a counter.

using VecMap = std::function<CVec(const CVec&)>;

/// One transducer S_t of a composed family, given by its action on vectors.
struct StreamStep {
  VecMap apply;        // S_t on H ⊕ L
  VecMap catalyst;     // public input -> catalyst
  VecMap public_part;  // projector onto H
  VecMap done_part;    // projector onto H_1 (applied to public outputs)
};

struct StreamOptions {
  int max_steps = 10000;          // m, the counter truncation
  double tail_bound = 1e-9;       // allowed ||psi_{m,0}||^2
  bool stop_when_converged = false;  // stop early once ||psi_{t,0}||^2 < tail_bound
  double catalyst_scale = 1.0;    // c < 1 runs S on xi ⊕ c w as well
  bool keep_blocks = false;       // keep catalyst blocks for dense verification
};

struct CompositionTrace {
  std::vector<CVec> outputs;          // psi_{t,1}, t = 1..steps
  std::vector<CVec> degraded_outputs; // public output of S(xi ⊕ c w), per counter value
  std::vector<CVec> catalyst_blocks;  // w_0, psi_{t,0} + w_t
  std::vector<double> continue_mass;  // ||psi_{t,0}||^2, t = 0..steps
  std::vector<double> step_complexity;  // ||w_t||^2
  double measured_complexity = 0.0;   // sum of ||catalyst block||^2
  double formula_complexity = 0.0;    // W_0 + sum ||psi_{t,0}||^2 (1 + W_t)
  double residual = 0.0;              // block residuals, root sum of squares
  double truncation_tail = 0.0;       // ||psi_{m,0}||^2
  CVec remainder;                     // psi_{m,0}
  long steps = 0;
};

/// Counter composition V_c · sum_t |t><t| ⊗ S_t, verified block by block:
/// S_t(psi_{t,0} ⊕ w_t) must equal psi_{t+1,0} + psi_{t+1,1} ⊕ w_t.
CompositionTrace compose_streaming(const std::function<StreamStep(int)>& step, const CVec& psi00,
                                   const StreamOptions& opts);

/// Dense counterpart: builds the composite unitary on (m + 1) blocks and verifies
/// the assembled certificate directly. done[t] projects onto H_1 for the output of S_t.
struct DenseComposition {
  Transducer composite;
  Certificate certificate;
  CompositionTrace trace;
};
DenseComposition compose_transducers(const std::vector<Transducer>& steps, const std::vector<CMat>& done,
                                     const CVec& psi00, double tail_bound = 1e-9);

/// Oracle-mode execution: S applied to xi ⊕ c w; error of the public part against tau.
struct OracleModeRun {
  double scale = 1.0;
  double error = 0.0;             // ||P_H S(xi ⊕ c w) - tau||
  double catalyst_deficit = 0.0;  // ||(1 - c) w||
  double equivalent_calls = 0.0;  // K with 2 sqrt(W / K) equal to the error
};
OracleModeRun oracle_mode_run(const Transducer& s, const Certificate& cert, double scale);

nlohmann::json to_json(const Certificate& c);

}  // namespace elfs
