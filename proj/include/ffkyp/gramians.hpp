#pragma once

#include "ffkyp/core_model.hpp"
#include "ffkyp/lmi.hpp"
#include "ffkyp/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ffkyp {

struct GramianOptions {
  int quad_nodes = 201;
  /// Multiply every frequency integral by 1/(2π).
  bool classical_normalization = false;
  /// Step of the τ grid for transition matrices and shifted Gramians (s).
  double time_step = 1e-3;
};

/// Φ(t_k, t_0) sampled on a uniform grid.
struct StateTransition {
  std::vector<double> times;
  std::vector<Matrix> phi;
  /// Largest excursion of the trajectory outside the parameter box.
  double box_excursion = 0.0;
};

/// RK4 integration of dΦ/dt = A(p(t)) Φ, Φ(t0, t0) = I.
StateTransition state_transition(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t0,
                                 double t_end, double step);

/// Φ(t, τ_k) for τ_k = t - k h down to 0 (returned in increasing τ), by
/// integrating dΦ(t,τ)/dτ = -Φ(t,τ) A(p(τ)) backward from Φ(t, t) = I.
StateTransition backward_transition(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                                    double step);

/// ∫_Ω (jωI - A)^{-1} B B^T (jωI - A)^{-*} dω.
Matrix gramian_lti_ff(const Matrix& A, const Matrix& B, const FrequencyRange& range,
                      const GramianOptions& options = {});

/// W_p at a frozen parameter value.
Matrix gramian_lpv_frozen(const LpvSystem& system, const Vector& p, const FrequencyRange& range,
                          const GramianOptions& options = {});

/// Ŵ_p(t) = Φ(t,0) [∫ R(ω, p(t)) B(p(0)) B(p(0))^T R^*(ω, p(t)) dω] Φ(t,0)^T,
/// R(ω, p) = (jωI - A(p))^{-1}.
Matrix gramian_lpv_weighted(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                            const FrequencyRange& range, const GramianOptions& options = {});

struct ShiftedGramians {
  Matrix w1;
  Matrix w2;
};

/// W_ṗ¹ and W_ṗ² at time t from the τ-integrals V_ṗ¹(jω), V_ṗ²(jω).
ShiftedGramians gramian_lpv_shifted(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                                    const FrequencyRange& range, const GramianOptions& options = {});

struct FrozenTraceSummary {
  double at_point = 0.0;
  Vector point;
  double min = 0.0;
  Vector argmin;
  double max = 0.0;
  Vector argmax;
};

/// tr W_p at `point` (default: box midpoint) plus its extremes over a p-grid.
FrozenTraceSummary frozen_trace_summary(const LpvSystem& system, const FrequencyRange& range, int grid_density,
                                        const GramianOptions& options = {},
                                        std::optional<Vector> point = std::nullopt);

struct GramianSet {
  Matrix w_p;
  Matrix w_hat_p;
  Matrix w_dot_p_1;
  Matrix w_dot_p_2;
  double trace_w_p = 0.0;
  double trace_w_hat_p = 0.0;
  double trace_w_dot_p_1 = 0.0;
  double trace_w_dot_p_2 = 0.0;
  FrequencyRange range = FrequencyRange::entire();
  double time = 0.0;
};

/// All four Gramians at time t along the trajectory.
GramianSet gramian_set(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                       const FrequencyRange& range, const GramianOptions& options = {});

enum class TraceBoundMethod { kUasDecay, kLyapunovLmi };

const char* to_string(TraceBoundMethod method);

struct ShiftedTraceBound {
  TraceBoundMethod method = TraceBoundMethod::kUasDecay;
  /// Bounds selected by `method`.
  double bound_1 = 0.0;
  double bound_2 = 0.0;
  /// M̄_i = m_i I.
  double m_1 = 0.0;
  double m_2 = 0.0;
  Matrix m_bar_1;
  Matrix m_bar_2;
  /// α² m_i / (2β) from the UAS transition bound ‖Φ(t,τ)‖ ≤ α e^{-β(t-τ)}.
  double uas_bound_1 = 0.0;
  double uas_bound_2 = 0.0;
  /// min tr X with (A(p)+sI) X + X (A(p)+sI)^T + m_i I <= 0 at the p-vertices
  /// (NaN when that LMI is infeasible).
  double lmi_bound_1 = 0.0;
  double lmi_bound_2 = 0.0;
};

struct TraceBoundOptions {
  TraceBoundMethod method = TraceBoundMethod::kUasDecay;
  int grid_density = 11;
  int quad_nodes = 201;
  double lyapunov_shift = 0.5;
};

/// Upper bounds on tr W_ṗ¹ and tr W_ṗ².
ShiftedTraceBound shifted_trace_bound(const LpvSystem& system, const FrequencyRange& range, const UasCertificate& uas,
                                      const TraceBoundOptions& options = {});

}  // namespace ffkyp
