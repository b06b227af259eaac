#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "elfs/graph.hpp"
#include "elfs/transducer.hpp"
#include "json.hpp"

namespace elfs {

// Counter registers are capped at 2^16 values.
inline constexpr long kMaxCounterRange = 1L << 16;

/// The rotation R = (I - 2|psi><psi|)(2P - I) driven by U' = (I - 2|psi><psi|) S.
struct RotationModel {
  Transducer reflection;  // S, transducing (2P - I) on the relevant states
  CVec start;             // |psi>, e.g. |phi_s>
  CVec target;            // P|psi> / ||P|psi||, e.g. |f>
  CMat u_prime;           // (I - 2|psi><psi|) S on the full space
  CMat rotation;          // ideal R on the full space
  double sin_theta = 0.0; // ||P psi||
  double theta = 0.0;
  double phase_error = 0.0;  // max deviation of R's eigenphases on span{psi, target} from ±2 theta
};

RotationModel rotation_model(const Graph& g);
/// Generic form: S = (2 Pi - I)(2 Delta - I) with public space ker(Pi).
RotationModel rotation_model(const CMat& pi, const CMat& delta, const CVec& psi);

/// (1/sqrt T) sum_t R^t |psi> |t>, produced by composing S_t = U' ⊗ Pi_{>t} + I ⊗ Pi_{<=t}.
struct PowerState {
  long range = 1;            // T
  CMat slices;               // column t: (1/sqrt T) R^t |psi>
  double complexity = 0.0;   // composed W
  double residual = 0.0;
  long calls = 0;            // steps composed
  double catalyst_scale = 1.0;
  CMat degraded;             // normalized output with the catalyst scaled by catalyst_scale
  double degraded_distance = 0.0;
};
PowerState controlled_power_state(const RotationModel& model, long range);
PowerState controlled_power_state(const Graph& g, long range);

/// Counter distribution after the inverse QFT.
std::vector<double> qpe_distribution(const CMat& slices);
/// Phase k/T mapped to the branch theta in [0, pi/2].
double counter_to_theta(long k, long range);

enum class QpeMode { exact, degraded };

struct QpeOptions {
  QpeMode mode = QpeMode::exact;
  int median_groups = 0;  // 0: single readout; otherwise median of this many group means
  int group_size = 1;
};

struct EstimateRecord {
  std::string quantity;      // what `estimate` estimates
  double estimate = 0.0;
  double exact = 0.0;        // reference value from the solver
  double sin_theta = 0.0;    // readout
  long counter_value = 0;
  long range = 0;            // T
  double tau = 0.0;
  double eta = 0.0;          // stub parameter, when a modified graph is used
  long walk_steps = 0;       // charged budget tau * T per readout
  int iterations = 0;
  bool success = false;
};

/// Memoized counter distributions, keyed by instance and T.
class QpeCache {
 public:
  const std::vector<double>& get(const std::string& key, long range, QpeMode mode, const RotationModel& m);
  const std::vector<double>& get(const Graph& g, long range, QpeMode mode);

 private:
  std::map<std::pair<std::string, long>, std::vector<double>> exact_, degraded_;
};

/// QPE readout of sin theta = 1/sqrt(2 R_s d_s). success: |estimate - exact| <= 2 pi / T.
EstimateRecord qpe_estimate(const Graph& g, double tau, long range, std::uint64_t seed,
                            const QpeOptions& opts = {}, QpeCache* cache = nullptr);

/// Multiplicative estimate of R_s d_s given ET_bar >= ET_s and R_s d_s / 2 <= p <= R_s d_s.
inline constexpr double kKnownRangeConstant = 8.0;
long known_estimate_range(double et_bar, double eps);
EstimateRecord estimate_known(const Graph& g, double et_bar, double p, double eps, std::uint64_t seed,
                              QpeCache* cache = nullptr, const QpeOptions& opts = {});

/// Algorithm 1: halving search for p~ with 7/18 <= p~ R_s d_s <= 16.
inline constexpr double kSearchRangeConstant = 17.8;
long search_range(double et_bar);
EstimateRecord binary_search_estimate(const Graph& g, double et_bar, std::uint64_t seed,
                                      QpeCache* cache = nullptr);
/// ceil(log2 ET_bar) + 2
int binary_search_iteration_cap(double et_bar);

struct LowerBoundRecord {
  Graph plus, minus;               // weights 1/2 -+ delta on the source edge
  double rd_plus = 0.0, rd_minus = 0.0;
  double ratio = 0.0;              // rd_plus / rd_minus
  double theta_plus = 0.0, theta_minus = 0.0;
  double angle_gap = 0.0;          // |theta_plus - theta_minus|
  double overlap_gap = 0.0;        // |sin^2 theta_plus - sin^2 theta_minus|
  double flow_overlap = 0.0;       // |<f_plus|f_minus>|
};
LowerBoundRecord lower_bound_fixture(double delta);

/// omega = 1/||P psi||^2 from QPE on (2 Pi - I)(2 Delta - I); cost tau * T.
EstimateRecord witness_size_estimate(const CMat& pi, const CMat& delta, const CVec& psi, double tau,
                                     long range, std::uint64_t seed);

nlohmann::json to_json(const EstimateRecord& r);

}  // namespace elfs
