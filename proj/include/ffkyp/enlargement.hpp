#pragma once

#include "ffkyp/core_model.hpp"
#include "ffkyp/gramians.hpp"
#include "ffkyp/lmi.hpp"
#include "ffkyp/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ffkyp {

enum class StabilityMode { kBibs, kUas };

const char* to_string(StabilityMode mode);
StabilityMode parse_stability_mode(const std::string& s);

/// sup over a p-grid (vertices included) of max(0, λ_max(-[A^* I](Ψ⊗I)[A; I])).
double gap_squared(const LpvSystem& system, const FrequencyRange& range, int p_grid_density = 11);
/// The same quantity at a single frozen A.
double gap_squared_at(const Matrix& A, const FrequencyRange& range);

struct TraceInputs {
  double trace_w_p_min = 0.0;
  double trace_w_hat_p = 0.0;
  double trace_w_dot_p = 0.0;
};

/// Minimal admissible δ²:
///   UAS:  gap² tr W_ṗ / tr W_p
///   BIBS: gap² (tr W_ṗ - tr Ŵ_p) / tr W_p
/// clamped at 0 and multiplied by `safety_factor`.
double delta_squared(double gap_sq, const TraceInputs& traces, StabilityMode mode, double safety_factor = 1.0);

struct EnlargedRange {
  FrequencyRange range = FrequencyRange::entire();
  std::vector<std::string> warnings;
};

/// Low → √(ϖl² + δ²); high → √(ϖh² - δ²) (entire axis when negative);
/// middle → centre ± √((ϖ2-ϖ1)² + 4δ²)/2, which becomes a low range once the
/// lower edge would cross zero.
EnlargedRange enlarge_range(const FrequencyRange& range, double delta_sq);

/// sup over a p-grid of the spectral radius of A(p).
double uniform_spectral_radius(const LpvSystem& system, int p_grid_density = 11);
/// sup over a p-grid of σ_max(A(p)).
double uniform_spectral_norm(const LpvSystem& system, int p_grid_density = 11);

enum class TraceSource { kBound, kQuadrature };

const char* to_string(TraceSource source);

struct EnlargementOptions {
  StabilityMode mode = StabilityMode::kUas;
  int p_grid_density = 11;
  GramianOptions gramian;
  /// Where tr W_ṗ comes from: Lyapunov-type bounds or time-domain quadrature.
  TraceSource trace_source = TraceSource::kBound;
  TraceBoundOptions bound;
  /// Trajectory and evaluation time for the time-dependent Gramians.
  std::optional<ScheduleTrajectory> trajectory;
  double evaluation_time = 20.0;
  /// Fixed UAS constants; when absent a certificate is searched at `c3`.
  std::optional<double> c1;
  std::optional<double> c2;
  double c3 = 1.0;
  double safety_factor = 1.0;
};

struct EnlargementResult {
  double gap_squared = 0.0;
  double delta_squared = 0.0;
  StabilityMode mode = StabilityMode::kUas;
  double trace_w_p_min = 0.0;
  double trace_w_hat_p = 0.0;
  double trace_w_dot_p = 0.0;
  TraceSource trace_source = TraceSource::kBound;
  FrequencyRange original = FrequencyRange::entire();
  FrequencyRange enlarged = FrequencyRange::entire();
  double rho_unif = 0.0;
  double sigma_unif = 0.0;
  /// Low range reaching ρ_unif with a zero gap: no enlargement needed.
  bool spectral_radius_shortcut = false;
  std::optional<UasCertificate> uas;
  std::optional<ShiftedTraceBound> trace_bound;
  std::vector<std::string> warnings;
};

/// gap → traces → δ² → enlarged range.
EnlargementResult recommend_range(const LpvSystem& system, const FrequencyRange& range,
                                  const EnlargementOptions& options = {});

}  // namespace ffkyp
