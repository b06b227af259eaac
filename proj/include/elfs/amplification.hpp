#pragma once

#include <cstdint>
#include <vector>

#include "elfs/transducer.hpp"
#include "json.hpp"

namespace elfs {

/// The same transducer in coordinates [public | private], public basis = leading unit vectors.
Transducer block_form(const Transducer& s);

/// s acting on its own space, identity on `extra` private coordinates appended after it.
Transducer extend_private(const Transducer& s, Eigen::Index extra);

/// `first` then `second`, each acting on the shared public space and its own private register.
/// Both must have the same public dimension; the result lives on H ⊕ L_first ⊕ L_second.
Transducer sequential_product(const Transducer& first, const Transducer& second);

/// Round-t counter range T_t = max(1, floor((6/5)^t)).
long aa_schedule(int t);

struct LasVegasStats {
  double alpha = 0.0;
  int runs = 0;
  int failures = 0;               // runs whose output is not the target to 1e-9
  double mean_rotation_calls = 0.0;
  double max_rotation_calls = 0.0;
  double mean_schedule_sum = 0.0;   // per run: sum of T_t over the rounds entered
  double exact_schedule_sum = 0.0;  // sum_t beta_t^2 T_t from the exact round masses
  double min_fidelity = 1.0;
  double mean_rounds = 0.0;
};

struct ComposedAmplification {
  double alpha = 0.0;
  int rounds = 0;                      // counter truncation m
  double complexity = 0.0;             // W of the composed transducer
  double formula_complexity = 0.0;     // W_0 + sum beta_t^2 (1 + W_t)
  double reference = 0.0;              // (W_U + W_V + 1) / alpha
  double w_u = 0.0, w_v = 0.0;
  double fidelity = 0.0;               // <target| rho_public |target>
  double off_target = 0.0;
  double truncation_tail = 0.0;
  double residual = 0.0;               // worst certificate residual met
  std::vector<double> continue_mass;   // beta_t^2
  std::vector<double> round_complexity;  // normalized W_t
  CMat marked_state;                   // reduced output state on the public space, original coordinates
};

struct ZeroErrorResult {
  LasVegasStats las_vegas;
  ComposedAmplification composed;
  Certificate certificate;  // summary certificate of the composed transducer
};

struct ZeroErrorOptions {
  int runs = 10000;
  int m_max = 10000;
  double tail_bound = 1e-9;
  long max_counter = 1L << 22;  // cap on T_t
};

/// Zero-error amplitude amplification from `start` to `target` with
/// R = (2|start><start| - I)(2|target><target| - I), u_refl reflecting about start and
/// v_refl about target on the relevant subspace.
ZeroErrorResult zero_error_aa(const Transducer& u_refl, const Transducer& v_refl, const CVec& start,
                              const CVec& target, std::uint64_t seed,
                              const ZeroErrorOptions& opts = {});

/// Direct explicit-register composition of one round (T_t small): normalized W_t and
/// marked output, for cross-checking the factorized accounting.
struct ExplicitRound {
  double complexity = 0.0;
  CVec marked;      // done part on system ⊗ j ⊗ ancilla
  CVec continuing;  // continuing part
};
ExplicitRound explicit_round(const Transducer& r_blk, const Transducer& mark_blk, const CVec& start_rest,
                             long t_range);

nlohmann::json to_json(const ZeroErrorResult& r);

}  // namespace elfs
